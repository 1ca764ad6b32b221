#include "macsim/csv.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "macsim/error.hpp"
#include "support/oracles.hpp"

using namespace macsim;

TEST_CASE("format_double renders integers without exponent") {
  CHECK(csv::format_double(0.0) == "0");
  CHECK(csv::format_double(1.0) == "1");
  CHECK(csv::format_double(100.0) == "100");
  CHECK(csv::format_double(-42.0) == "-42");
  CHECK(csv::format_double(1200000.0) == "1200000");
}

TEST_CASE("format_double round-trips arbitrary values") {
  const double values[] = {0.1,           1.0 / 3.0,     2.1972245773362196,
                           -1e-9,         3.14159265358979, 0.0001,
                           123456.789012, -0.5,          1e300};
  for (double v : values) {
    const std::string s = csv::format_double(v);
    CHECK(csv::parse_double(s, "test") == v);
  }
}

TEST_CASE("format_int renders plain decimal") {
  CHECK(csv::format_int(0) == "0");
  CHECK(csv::format_int(-7) == "-7");
  CHECK(csv::format_int(123456789012345LL) == "123456789012345");
}

TEST_CASE("writer and reader round-trip a small table") {
  const std::string dir = testsupport::scratch_dir("csv");
  const std::string path = dir + "/t.csv";
  {
    csv::Writer w(path);
    w.row({"a", "b", "c"});
    w.row({"1", "", "x"});
    w.row({"2", "0.5", ""});
    w.close();
  }
  const csv::Table t = csv::read_file(path);
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "", "x"});
  CHECK(t.rows[1] == std::vector<std::string>{"2", "0.5", ""});
}

TEST_CASE("writer rejects fields that would need quoting") {
  const std::string dir = testsupport::scratch_dir("csv");
  csv::Writer w(dir + "/bad.csv");
  CHECK_THROWS_AS(w.row({"a,b"}), DataError);
  CHECK_THROWS_AS(w.row({"a\"b"}), DataError);
  CHECK_THROWS_AS(w.row({"a\nb"}), DataError);
  CHECK_THROWS_AS(w.row({"a\rb"}), DataError);
  w.row({"plain"});
  w.close();
}

TEST_CASE("reader strips trailing carriage returns") {
  const std::string dir = testsupport::scratch_dir("csv");
  const std::string path = dir + "/crlf.csv";
  {
    std::ofstream out(path, std::ios::binary);
    out << "h1,h2\r\nv1,v2\r\n";
  }
  const csv::Table t = csv::read_file(path);
  CHECK(t.header == std::vector<std::string>{"h1", "h2"});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0] == std::vector<std::string>{"v1", "v2"});
}

TEST_CASE("reading a missing or empty file is an error") {
  const std::string dir = testsupport::scratch_dir("csv");
  CHECK_THROWS_AS(csv::read_file(dir + "/nope.csv"), DataError);
  const std::string empty = dir + "/empty.csv";
  { std::ofstream out(empty); }
  CHECK_THROWS_AS(csv::read_file(empty), DataError);
}

TEST_CASE("split_line keeps empty fields") {
  CHECK(csv::split_line("a,,b") == std::vector<std::string>{"a", "", "b"});
  CHECK(csv::split_line("") == std::vector<std::string>{""});
  CHECK(csv::split_line(",") == std::vector<std::string>{"", ""});
}

TEST_CASE("parsers reject junk and partial numbers") {
  CHECK(csv::parse_double("1.5", "f") == 1.5);
  CHECK(csv::parse_int("-3", "f") == -3);
  CHECK_THROWS_AS(csv::parse_double("", "f"), DataError);
  CHECK_THROWS_AS(csv::parse_double("1.5x", "f"), DataError);
  CHECK_THROWS_AS(csv::parse_int("7.2", "f"), DataError);
  CHECK_THROWS_AS(csv::parse_int("abc", "f"), DataError);
}
