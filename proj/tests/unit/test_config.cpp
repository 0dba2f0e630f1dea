#include <doctest.h>

#include <string>
#include <vector>

#include "core/config.hpp"
#include "test_util.hpp"

using namespace dtlab;

namespace {
const char* kSample =
    "[a]\n"
    "x = 1.5\n"
    "y = 2\n"
    "[b]\n"
    "name = hello world\n"
    "flag = true\n"
    "list = 1 2 3\n"
    "# comment line\n"
    "; another comment\n"
    "neg = -4\n";
}

TEST_CASE("typed getters over flattened section keys") {
  Config c = Config::parse_string(kSample, "sample");
  CHECK(c.origin() == "sample");
  CHECK(c.has("a.x"));
  CHECK_FALSE(c.has("a.missing"));
  CHECK(c.get_double("a.x") == doctest::Approx(1.5));
  CHECK(c.get_int("a.y") == 2);
  CHECK(c.get_string("b.name") == "hello world");
  CHECK(c.get_bool("b.flag", false));
  CHECK(c.get_bool("b.nothing", true));
  std::vector<double> xs = c.get_doubles("b.list");
  REQUIRE(xs.size() == 3);
  CHECK(xs[0] == 1.0);
  CHECK(xs[2] == 3.0);
  CHECK(c.get_int("b.neg") == -4);
  CHECK(c.get_double("a.z", 7.5) == 7.5);
  CHECK(c.get_string("a.z", "dflt") == "dflt");
  CHECK(c.line_of("b.name") == 5);
}

TEST_CASE("unused keys are reported in file order") {
  Config c = Config::parse_string(kSample);
  auto all = c.unused_keys();
  REQUIRE(all.size() == 6);
  CHECK(all[0] == "a.x");
  CHECK(all[5] == "b.neg");
  (void)c.get_double("a.x");
  (void)c.get_string("b.name");
  auto rest = c.unused_keys();
  REQUIRE(rest.size() == 4);
  CHECK(rest[0] == "a.y");
  (void)c.get_int("a.y");
  (void)c.get_bool("b.flag", false);
  (void)c.get_doubles("b.list");
  (void)c.get_int("b.neg");
  CHECK(c.unused_keys().empty());
}

TEST_CASE("malformed input is rejected with the config code") {
  CHECK_ERRCODE(Err::Config, Config::parse_string("[a]\nx = 1\nx = 2\n"));
  CHECK_ERRCODE(Err::Config, Config::parse_string("[unterminated\n"));
  CHECK_ERRCODE(Err::Config, Config::parse_string("keywithoutvalue\n"));
  CHECK_ERRCODE(Err::Config, Config::parse_string("[ok]\nbad key! = 1\n"));
  CHECK_ERRCODE(Err::Config, Config::parse_file("definitely_missing_config.cfg"));
}

TEST_CASE("value conversion failures carry the key and line") {
  Config c = Config::parse_string("[a]\nx = abc\nu = -3\nf = maybe\n", "origin_tag");
  CHECK_ERRCODE(Err::Config, c.get_double("a.x"));
  CHECK_ERRCODE(Err::Config, c.get_int("a.x"));
  CHECK_ERRCODE(Err::Config, c.get_uint("a.u"));
  CHECK_ERRCODE(Err::Config, c.get_bool("a.f", true));
  CHECK_ERRCODE(Err::Config, c.get_double("a.missing"));
  const std::string msg = testutil::message_of([&] { (void)c.get_double("a.x"); });
  CHECK(msg.find("a.x") != std::string::npos);
  CHECK(msg.find("origin_tag") != std::string::npos);
}

TEST_CASE("keys may use dashes and underscores") {
  Config c = Config::parse_string("[s]\nmy-key = 1\nmy_key2 = 2\n");
  CHECK(c.get_int("s.my-key") == 1);
  CHECK(c.get_int("s.my_key2") == 2);
}
