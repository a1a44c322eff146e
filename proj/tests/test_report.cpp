#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "finsler/report.hpp"

using namespace finsler;

TEST_CASE("numbers are printed with pinned round-trippable formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5) == "-2.5");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "\"nan\"");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "\"inf\"");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "\"-inf\"");
  CHECK(csv_num(0.1) == "0.10000000000000001");
  CHECK(csv_num(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("json string escaping") {
  CHECK(escape_json("plain") == "plain");
  CHECK(escape_json("a\"b") == "a\\\"b");
  CHECK(escape_json("a\\b") == "a\\\\b");
  CHECK(escape_json("line\nbreak\ttab") == "line\\nbreak\\ttab");
  CHECK(escape_json(std::string(1, '\x01')) == "\\u0001");
}

TEST_CASE("builder emits ordered json with correct commas") {
  JsonBuilder jb;
  jb.begin_object();
  jb.field("name", "demo");
  jb.field("count", 3);
  jb.field("flag", true);
  jb.key("values").begin_array();
  jb.value(1.5);
  jb.value(std::numeric_limits<double>::quiet_NaN());
  jb.end_array();
  jb.key("nested").begin_object();
  jb.field("x", 0.5);
  jb.end_object();
  jb.end_object();
  CHECK(jb.str() ==
        R"({"name":"demo","count":3,"flag":true,"values":[1.5,"nan"],)"
        R"("nested":{"x":0.5}})");
}

TEST_CASE("csv cells are quoted only when needed") {
  CHECK(csv_cell("plain") == "plain");
  CHECK(csv_cell("with,comma") == "\"with,comma\"");
  CHECK(csv_cell("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_cell("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("sweep report serialization is deterministic and parseable") {
  SweepReport rep;
  rep.config.preset = "hardy";
  rep.family = "flat";
  SweepRow row;
  row.delta = 10.0;
  row.eps = 0.1;
  row.Q = 10.78;
  row.Q_minus_1 = 9.78;
  row.l0 = 6.08;
  row.l1 = 1.0;
  row.l2 = 0.5;
  row.upper_bound = 104.0;
  row.bound_ok = true;
  row.ok = true;
  rep.rows.push_back(row);
  rep.summary.all_above_one = true;
  rep.summary.notes.push_back("note, with comma");

  std::string a = sweep_report_json(rep, false);
  std::string b = sweep_report_json(rep, false);
  CHECK(a == b);
  CHECK(a.find("\"schema\":\"sweep_report\"") != std::string::npos);
  CHECK(a.find("\"version\":1") != std::string::npos);
  // NaN fields (here the summary fit) must stay inside quoted strings
  CHECK(a.find("\"terminal_gap\":\"nan\"") != std::string::npos);
  CHECK(a.find("nan,") == std::string::npos);
  // row field order is pinned
  size_t pd = a.find("\"delta\":");
  size_t pq = a.find("\"Q\":");
  size_t pb = a.find("\"bound_ok\":");
  CHECK(pd < pq);
  CHECK(pq < pb);
  CHECK(a.find("wall_time_s") == std::string::npos);
  std::string timed = sweep_report_json(rep, true);
  CHECK(timed.find("wall_time_s") != std::string::npos);

  std::string csv = sweep_report_csv(rep, false);
  CHECK(csv.rfind("# sweep_report v1\n", 0) == 0);
  CHECK(csv.find("delta,eps,k_eps,Q,") != std::string::npos);
  CHECK(csv.find("10,0.1") != std::string::npos);
}

TEST_CASE("atomic write creates parent directories and full content") {
  namespace fs = std::filesystem;
  fs::path dir = "report_test_dir/sub";
  fs::path file = dir / "out.json";
  fs::remove_all("report_test_dir");
  write_atomic(file.string(), "{\"k\":1}\n");
  std::ifstream f(file);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == "{\"k\":1}\n");
  CHECK_FALSE(fs::exists(file.string() + ".tmp"));
  write_atomic(file.string(), "second\n");
  std::ifstream g(file);
  std::stringstream s2;
  s2 << g.rdbuf();
  CHECK(s2.str() == "second\n");
  fs::remove_all("report_test_dir");
}
