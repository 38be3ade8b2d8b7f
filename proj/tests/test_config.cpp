#include "doctest.h"

#include <stdexcept>

#include <cstdio>
#include <filesystem>
#include <string>

#include "bcqq/bytesio.hpp"
#include "bcqq/config.hpp"

using namespace bcqq;

TEST_SUITE("config") {

TEST_CASE("parser accepts the documented grammar") {
    const config::KvMap kv = config::parse_text(
        "a = 1\n"
        "# a full-line comment\n"
        "b=two words\n"
        "\n"
        "c.d-e_f = 3 # a trailing comment\r\n"
        "  padded   =   spaced out  \n");
    REQUIRE(kv.size() == 4);
    CHECK(kv.at("a") == "1");
    CHECK(kv.at("b") == "two words");
    CHECK(kv.at("c.d-e_f") == "3");
    CHECK(kv.at("padded") == "spaced out");
}

TEST_CASE("parser reports the offending line") {
    CHECK_THROWS_WITH_AS(config::parse_text("a=1\na=2\n"),
                         doctest::Contains("line 2"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config::parse_text("a=1\na=2\n"),
                         doctest::Contains("duplicate key 'a'"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config::parse_text("just a stray token\n"),
                         doctest::Contains("expected key=value"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config::parse_text("bad key = 1\n"),
                         doctest::Contains("invalid key"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config::parse_text("a =\n"),
                         doctest::Contains("empty value"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config::parse_text("ok = 1\n\n# fine\nbroken\n"),
                         doctest::Contains("line 4"), std::invalid_argument);
}

TEST_CASE("file round-trip and missing file") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "config_case.cfg").string();
    bytesio::write_file(path, "alpha = 0.5\nbeta = on\n");
    const config::KvMap kv = config::parse_file(path);
    std::remove(path.c_str());
    CHECK(kv.at("alpha") == "0.5");
    CHECK(kv.at("beta") == "on");
    CHECK_THROWS_AS(config::parse_file("/nonexistent/nowhere.cfg"), std::runtime_error);
}

TEST_CASE("typed lookups parse and fall back") {
    const config::KvMap kv = config::parse_text(
        "x = 1.5\nn = 42\nneg = -7\nflag = on\nquiet = off\nword = zz\n");

    CHECK(config::get_double(kv, "x", 0.0) == 1.5);
    CHECK(config::get_double(kv, "missing", 2.25) == 2.25);
    CHECK(config::get_int(kv, "n", 0) == 42);
    CHECK(config::get_int(kv, "neg", 0) == -7);
    CHECK(config::get_int(kv, "missing", 9) == 9);
    CHECK(config::get_on_off(kv, "flag", false));
    CHECK_FALSE(config::get_on_off(kv, "quiet", true));
    CHECK(config::get_on_off(kv, "missing", true));
    CHECK(config::get_string(kv, "word", "") == "zz");
    CHECK(config::get_string(kv, "missing", "dflt") == "dflt");

    CHECK_THROWS_WITH_AS(config::get_double(kv, "word", 0.0), doctest::Contains("word"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(config::get_int(kv, "x", 0), doctest::Contains("integer"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(config::get_on_off(kv, "word", false),
                         doctest::Contains("on|off"), std::invalid_argument);
}

TEST_CASE("unknown keys are listed by name") {
    const config::KvMap kv = config::parse_text("a=1\nzz=2\nyy=3\n");
    const std::map<std::string, int> allowed{{"a", 0}, {"b", 0}};
    CHECK_THROWS_WITH_AS(config::require_known_keys(kv, allowed), doctest::Contains("zz"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(config::require_known_keys(kv, allowed), doctest::Contains("yy"),
                         std::invalid_argument);

    const std::map<std::string, int> all{{"a", 0}, {"zz", 0}, {"yy", 0}};
    CHECK_NOTHROW(config::require_known_keys(kv, all));
}

TEST_CASE("canonical text is sorted and newline-terminated") {
    const config::KvMap kv = config::parse_text("b = 2\na = 1\n");
    CHECK(config::canonical_text(kv) == "a=1\nb=2\n");
}

TEST_CASE("hash ignores formatting but tracks content") {
    const auto a = config::spec_hash(config::parse_text("a=1\nb=2\n"));
    const auto b = config::spec_hash(config::parse_text("b = 2   # order and spacing differ\na=1"));
    CHECK(a == b);
    REQUIRE(a.size() == 16);
    for (const char c : a) CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));

    const auto changed = config::spec_hash(config::parse_text("a=1\nb=3\n"));
    CHECK(changed != a);
    const auto extra = config::spec_hash(config::parse_text("a=1\nb=2\nc=0\n"));
    CHECK(extra != a);
}

TEST_CASE("hash primitive matches published test vectors") {
    CHECK(config::fnv1a64("") == 14695981039346656037ull);
    CHECK(config::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(config::fnv1a64("foobar") == 0x85944171f73967e8ull);
}

}  // TEST_SUITE
