// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <chrono>
#include <fstream>

#include "render.hpp"
#include "skelgen/error.hpp"
#include "skelgen/ocr.hpp"

using namespace skelgen;
using namespace skelgen::ocr;
using raster::GrayImage;

namespace {

const GrayImage kRegion(4, 3, 200);

std::size_t entries(const std::filesystem::path& dir) {
    return static_cast<std::size_t>(std::distance(std::filesystem::directory_iterator(dir), {}));
}

}  // namespace

TEST_SUITE("fixture") {
    TEST_CASE("scripted list") {
        FixtureRecognizer r({"users"});
        const auto res = r.recognize(kRegion);
        CHECK(res.text == "users");
        CHECK_FALSE(res.confidence);
        CHECK(r.consumed() == 1);
    }

    TEST_CASE("underrun") {
        FixtureRecognizer r({"users"});
        r.recognize(kRegion);
        try {
            r.recognize(kRegion);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::OcrBackend);
            CHECK(std::string(e.what()).find("fixture underrun") != std::string::npos);
        }
    }

    TEST_CASE("keyed by page and region index") {
        auto r = FixtureRecognizer::from_json_text(R"({"a:0":"first","a:1":"second","b:0":"other"})");
        r.begin_page("a");
        CHECK(r.recognize(kRegion).text == "first");
        CHECK(r.recognize(kRegion).text == "second");
        r.begin_page("b");
        CHECK(r.recognize(kRegion).text == "other");
        CHECK_THROWS_WITH_AS(r.recognize(kRegion), doctest::Contains("fixture underrun"), Error);
    }

    TEST_CASE("list mode ignores page boundaries") {
        auto r = FixtureRecognizer::from_json_text(R"(["x", "", "z"])");
        r.begin_page("p");
        CHECK(r.recognize(kRegion).text == "x");
        r.begin_page("q");
        CHECK(r.recognize(kRegion).text.empty());
        CHECK(r.recognize(kRegion).text == "z");
    }

    TEST_CASE("malformed fixture files") {
        CHECK_THROWS_AS(FixtureRecognizer::from_json_text("[1]"), Error);
        CHECK_THROWS_AS(FixtureRecognizer::from_json_text("\"x\""), Error);
        CHECK_THROWS_AS(FixtureRecognizer::from_json_text("[\"x\""), Error);
        try {
            FixtureRecognizer::from_file("/nonexistent/fixture.json");
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Io);
        }
    }
}

TEST_SUITE("external") {
    TEST_CASE("trimmed standard output") {
        ExternalRecognizer r("printf '  hello  world \\n\\n'");
        CHECK(r.recognize(kRegion).text == "hello  world");
    }

    TEST_CASE("region reaches the command as a PGM file") {
        testing::TempDir dir;
        ExternalRecognizer r("head -c 2 {input}; printf ' '; wc -c < {input}");
        r.set_temp_dir(dir.path());
        // "P5\n4 3\n255\n" + 12 bytes
        CHECK(r.recognize(kRegion).text == "P5 23");
        CHECK(entries(dir.path()) == 0);
    }

    TEST_CASE("non-zero exit") {
        testing::TempDir dir;
        ExternalRecognizer r("/bin/false");
        r.set_temp_dir(dir.path());
        try {
            r.recognize(kRegion);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::OcrBackend);
            CHECK(std::string(e.what()).find("ocr backend failure") != std::string::npos);
        }
        CHECK(entries(dir.path()) == 0);
    }

    TEST_CASE("diagnostics are captured") {
        ExternalRecognizer r("echo 'no language data' >&2; exit 3");
        CHECK_THROWS_WITH_AS(r.recognize(kRegion), doctest::Contains("no language data"), Error);
    }

    TEST_CASE("missing tool") {
        ExternalRecognizer r("/nonexistent/tesseract {input} -");
        CHECK_THROWS_WITH_AS(r.recognize(kRegion), doctest::Contains("ocr backend failure"), Error);
    }

    TEST_CASE("timeout kills the command") {
        testing::TempDir dir;
        ExternalRecognizer r("sleep 5", std::chrono::milliseconds(200));
        r.set_temp_dir(dir.path());
        const auto start = std::chrono::steady_clock::now();
        CHECK_THROWS_WITH_AS(r.recognize(kRegion), doctest::Contains("timed out"), Error);
        CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(3));
        CHECK(entries(dir.path()) == 0);
    }

    TEST_CASE("empty output is a valid result") {
        ExternalRecognizer r("true");
        CHECK(r.recognize(kRegion).text.empty());
    }

    TEST_CASE("empty template rejected") { CHECK_THROWS_AS(ExternalRecognizer(""), std::invalid_argument); }
}

TEST_CASE("trim_output") {
    CHECK(trim_output(" \t a b \r\n") == "a b");
    CHECK(trim_output("") == "");
    CHECK(trim_output(" \n ") == "");
}
