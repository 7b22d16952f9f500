#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "girder/config.hpp"

using girder::ConfigError;
using girder::ConfigValue;
using girder::parse_config;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("scalar values land with the right kinds") {
  ConfigValue root = parse_config(
      "count = 42\n"
      "ratio = -0.75\n"
      "big = 1e3\n"
      "name = \"bridge\"\n"
      "flag = true\n"
      "other = false\n");
  CHECK(root.at("count").as_number() == doctest::Approx(42.0));
  CHECK(root.at("ratio").as_number() == doctest::Approx(-0.75));
  CHECK(root.at("big").as_number() == doctest::Approx(1000.0));
  CHECK(root.at("name").as_string() == "bridge");
  CHECK(root.at("flag").as_bool());
  CHECK_FALSE(root.at("other").as_bool());
}

TEST_CASE("arrays nest and keep element order") {
  ConfigValue root = parse_config("pts = [[1, 2], [3, 4], [5, 6]]\nmixed = [1, 2, 3]\n");
  const auto& pts = root.at("pts").as_array();
  REQUIRE(pts.size() == 3);
  CHECK(pts[1].as_array()[0].as_number() == doctest::Approx(3.0));
  CHECK(pts[2].as_array()[1].as_number() == doctest::Approx(6.0));
  CHECK(root.at("mixed").as_array().size() == 3);
}

TEST_CASE("tables and dotted headers create nested scopes") {
  ConfigValue root = parse_config(
      "top = 1\n"
      "[sim]\n"
      "dt = 0.05\n"
      "[windows.girder]\n"
      "slope_center = 90.0\n"
      "[windows.column]\n"
      "slope_center = 90.0\n"
      "extent_min = 1.0\n");
  CHECK(root.at("top").as_number() == doctest::Approx(1.0));
  CHECK(root.at("sim").at("dt").as_number() == doctest::Approx(0.05));
  CHECK(root.at("windows").at("girder").at("slope_center").as_number() == doctest::Approx(90.0));
  CHECK(root.at("windows").at("column").at("extent_min").as_number() == doctest::Approx(1.0));
}

TEST_CASE("arrays of tables append one table per header") {
  ConfigValue root = parse_config(
      "[[surface]]\n"
      "id = \"A\"\n"
      "[[surface]]\n"
      "id = \"B\"\n");
  const auto& arr = root.at("surface").as_array();
  REQUIRE(arr.size() == 2);
  CHECK(arr[0].at("id").as_string() == "A");
  CHECK(arr[1].at("id").as_string() == "B");
}

TEST_CASE("comments and blank lines are ignored") {
  ConfigValue root = parse_config(
      "# leading comment\n"
      "\n"
      "a = 1  # trailing comment\n"
      "\n"
      "# [not_a_table]\n"
      "b = 2\n");
  CHECK(root.at("a").as_number() == doctest::Approx(1.0));
  CHECK(root.at("b").as_number() == doctest::Approx(2.0));
  CHECK(root.find("not_a_table") == nullptr);
}

TEST_CASE("string escapes decode") {
  ConfigValue root = parse_config(R"(s = "a\"b\\c\nd\te")" "\n");
  CHECK(root.at("s").as_string() == "a\"b\\c\nd\te");
}

TEST_CASE("errors carry the 1-based source line") {
  CHECK(error_line("a = 1\na = 2\n") == 2);                 // duplicate key
  CHECK(error_line("a = 1\nb = \"open\n") == 2);            // unterminated string
  CHECK(error_line("a = 1\nb = [1, 2\n") == 2);             // unterminated array
  CHECK(error_line("a = 1\n\nb = what\n") == 3);            // unparseable value
  CHECK(error_line("a = 1 extra\n") == 1);                  // trailing characters
  CHECK(error_line("[t\na = 1\n") == 1);                    // unclosed header
  CHECK(error_line("a = \"bad\\q\"\n") == 1);               // unknown escape
  CHECK(error_line("a = 1\n[a]\n") == 2);                   // scalar reused as table
}

TEST_CASE("table header reuse appends, scalar reuse fails") {
  ConfigValue root = parse_config(
      "[t]\na = 1\n"
      "[u]\nb = 2\n"
      "[t]\nc = 3\n");
  CHECK(root.at("t").at("a").as_number() == doctest::Approx(1.0));
  CHECK(root.at("t").at("c").as_number() == doctest::Approx(3.0));
  CHECK_THROWS_AS(parse_config("x = 5\n[[x]]\ny = 1\n"), ConfigError);
}

TEST_CASE("kind mismatches throw") {
  ConfigValue root = parse_config("n = 4\ns = \"x\"\n");
  CHECK_THROWS_AS(root.at("n").as_string(), ConfigError);
  CHECK_THROWS_AS(root.at("s").as_number(), ConfigError);
  CHECK_THROWS_AS(root.at("s").as_array(), ConfigError);
  CHECK_THROWS_AS(root.at("missing"), ConfigError);
}

TEST_CASE("fallback lookups use defaults only when absent") {
  ConfigValue root = parse_config("a = 2.5\nname = \"n\"\non = true\n");
  CHECK(root.number_or("a", 9.0) == doctest::Approx(2.5));
  CHECK(root.number_or("zzz", 9.0) == doctest::Approx(9.0));
  CHECK(root.string_or("name", "d") == "n");
  CHECK(root.string_or("zzz", "d") == "d");
  CHECK(root.bool_or("on", false));
  CHECK_FALSE(root.bool_or("zzz", false));
}

TEST_CASE("parse_config_file reads the shipped bridge description") {
  ConfigValue root = girder::parse_config_file(std::string(GIRDER_DATA_DIR) + "/five_span.cfg");
  CHECK(root.at("surface").as_array().size() == 11);
  CHECK(root.at("adjacency").as_array().size() == 10);
  CHECK_THROWS_AS(girder::parse_config_file("/nonexistent/path.cfg"), girder::Error);
}
