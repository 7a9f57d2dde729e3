#include "jost/cli/config.hpp"

#include <doctest.h>

#include <sstream>

using namespace jost;
using namespace jost::cli;

namespace {
RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}
}  // namespace

TEST_CASE("minimal Schroedinger config") {
  const RunConfig c = parse("[interaction]\nkind = schrodinger\nline = -0.5 1\n[channels]\nl = 0, 1\n[energy]\nk = 0.5, 1\n");
  CHECK(c.interaction.kind == InteractionKind::SchrodingerLocal);
  REQUIRE(c.interaction.sigma.lines().size() == 1);
  CHECK(c.interaction.sigma.lines()[0].g == -0.5);
  REQUIRE(c.channels.size() == 2);
  CHECK(c.channels[1].l() == 1);
  CHECK(c.k.size() == 2);
}

TEST_CASE("fractions, repeated lines and hashing") {
  const std::string text = "[interaction]\nkind = dirac-vector\nline = 0.3 1\nline = -0.3 2\n[channels]\nlist = 1/2:+, 3/2:-\n";
  const RunConfig a = parse(text);
  CHECK(a.interaction.sigma.lines().size() == 2);
  REQUIRE(a.channels.size() == 2);
  CHECK(a.channels[1].twoJ == 3);
  CHECK(a.hash == parse(text).hash);
  CHECK(a.hash != parse(text + "[energy]\nk = 1\n").hash);
  // comments and whitespace do not change the hash
  CHECK(a.hash == parse("# header\n" + text).hash);
}

TEST_CASE("config errors name the line and field") {
  try {
    parse("[interaction]\nkind = schrodinger\nline = 1 1\n[energy]\nk = abc\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 5") != std::string::npos);
    CHECK(msg.find("energy.k") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("[interaction]\nkind = schrodinger\nline = 1 1\nbogus = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[interaction]\nkind = schrodinger\nline = 1 1\n[energy]\nk = 1\nk = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[interaction]\nkind = schrodinger\nline = 1 1\n[tolerance]\nphase = -1\n"), ConfigError);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
