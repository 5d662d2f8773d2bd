#include <doctest.h>

#include <cmath>

#include "bitensor/toml.hpp"

using bitensor::parse_toml;
using bitensor::TomlError;

TEST_CASE("tables, arrays of tables and dotted keys") {
  const auto doc = parse_toml(R"toml(
# leading comment
title = "demo"   # trailing comment

[manifold.sphere]
coords = ["theta", "phi"]
domain = [
  [0, "pi", "polar"],   # first axis
  [0, "2*pi", true],
]

[[check]]
kind = "a"
tol = 1e-9

[[check]]
kind = "b"
opts = { depth = 2, name = 'raw\path' }
a.b.c = 3
)toml");
  CHECK(doc["title"] == "demo");
  CHECK(doc["manifold"]["sphere"]["coords"][1] == "phi");
  CHECK(doc["manifold"]["sphere"]["domain"][1][2] == true);
  CHECK(doc["manifold"]["sphere"]["domain"][0][1] == "pi");
  REQUIRE(doc["check"].size() == 2);
  CHECK(doc["check"][0]["tol"].get<double>() == 1e-9);
  CHECK(doc["check"][1]["opts"]["depth"] == 2);
  CHECK(doc["check"][1]["opts"]["name"] == "raw\\path");
  CHECK(doc["check"][1]["a"]["b"]["c"] == 3);
}

TEST_CASE("scalars") {
  const auto doc = parse_toml(
      "i = -42\nbig = 1_000\nf = 6.25e-1\ng = +2.0\nt = true\nf2 = false\n"
      "s = \"tab\\tquote\\\" \\u03b8\"\nq.\"quoted key\" = 1\npinf = inf\nninf = -inf\nn = nan\n");
  CHECK(doc["i"].is_number_integer());
  CHECK(doc["i"] == -42);
  CHECK(doc["big"] == 1000);
  CHECK(doc["f"].get<double>() == 0.625);
  CHECK(doc["g"].get<double>() == 2.0);
  CHECK(doc["t"] == true);
  CHECK(doc["f2"] == false);
  CHECK(doc["s"] == "tab\tquote\" \xCE\xB8");
  CHECK(doc["q"]["quoted key"] == 1);
  CHECK(std::isinf(doc["pinf"].get<double>()));
  CHECK(doc["ninf"].get<double>() < 0);
  CHECK(std::isnan(doc["n"].get<double>()));
}

TEST_CASE("errors carry line numbers") {
  const auto line_of = [](const char* text) -> std::size_t {
    try {
      (void)parse_toml(text);
    } catch (const TomlError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("a = 1\nb = \n") == 2);
  CHECK(line_of("a = 1\na = 2\n") == 2);
  CHECK(line_of("x = [1, 2\n") == 2);
  CHECK(line_of("\n\ns = \"open\n") == 3);
  CHECK(line_of("[table\n") == 1);
  CHECK(line_of("k = 1 2\n") == 1);
  CHECK(line_of("k = 12abc\n") == 1);
  CHECK(line_of("[a]\nx = 1\n[a.x]\n") == 3);
  CHECK(line_of("s = \"\\q\"\n") == 1);
}
