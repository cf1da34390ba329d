// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <sstream>

#include "skelgen/codegen.hpp"
#include "skelgen/error.hpp"

using namespace skelgen;
using namespace skelgen::codegen;
using detect::UiClass;

namespace {

const char* kPersonFile =
    "class Person:\n"
    "    def __init__(self):\n"
    "        self.name = None  # type: String  # private\n"
    "\n"
    "    def getName(self):  # public\n"
    "        pass\n";

const char* kUsersSql = "CREATE TABLE users (\n  id int,\n  name varchar(50),\n  PRIMARY KEY (id)\n);\n";

// Splits generated DDL back into columns and keys.
TableModel reparse_sql(const std::string& sql) {
    TableModel m;
    std::istringstream in(sql);
    std::string line;
    std::getline(in, line);
    m.table_name = line.substr(13, line.size() - 13 - 2);
    while (std::getline(in, line)) {
        if (line == ");") break;
        line = line.substr(2);
        if (line.back() == ',') line.pop_back();
        if (line.rfind("PRIMARY KEY (", 0) == 0) {
            std::string keys = line.substr(13, line.size() - 14);
            for (std::size_t pos = 0;;) {
                const auto comma = keys.find(", ", pos);
                m.primary_keys.push_back(keys.substr(pos, comma - pos));
                if (comma == std::string::npos) break;
                pos = comma + 2;
            }
            continue;
        }
        const auto sp = line.find(' ');
        m.table_attributes.push_back({line.substr(0, sp), line.substr(sp + 1)});
    }
    return m;
}

ir::PageElement el(UiClass cls, std::optional<std::string> text = {}, std::optional<std::string> link = {}) {
    return {cls, {0, 0, 10, 10}, std::move(text), std::move(link)};
}

std::string only_body_line(const ir::PageElement& e) {
    const auto html = html_generate({"p", 10, 10, {e}, {{0}}});
    const auto open = html.find("  <div class=\"row\">\n    ");
    REQUIRE(open != std::string::npos);
    const auto start = open + 24;
    return html.substr(start, html.find('\n', start) - start);
}

}  // namespace

TEST_SUITE("class diagrams") {
    TEST_CASE("Person trace") {
        const auto m = class_generation({"Person", "-name: String", "+getName()"});
        CHECK(m.class_name == "Person");
        CHECK(m.class_attributes == std::vector<Member>{{"name: String", Access::Private}});
        CHECK(m.class_methods == std::vector<Member>{{"getName()", Access::Public}});
        CHECK(class_file_maker(m) == kPersonFile);
    }

    TEST_CASE("class name only") {
        const auto m = class_generation({"Empty"});
        CHECK(m == ClassModel{"Empty", {}, {}});
        CHECK(class_file_maker(m) == "class Empty:\n    pass\n");
    }

    TEST_CASE("protected and default public") {
        const auto m = class_generation({"A", "/count", "run()"});
        CHECK(m.class_attributes == std::vector<Member>{{"count", Access::Protected}});
        CHECK(m.class_methods == std::vector<Member>{{"run()", Access::Public}});
    }

    TEST_CASE("explicit and implicit public are identical") {
        CHECK(class_generation({"A", "+x", "+f()"}) == class_generation({"A", "x", "f()"}));
        CHECK(class_generation({"A", "  + x "}) == class_generation({"A", "x"}));
    }

    TEST_CASE("no class name") { CHECK_THROWS_WITH_AS(class_generation({}), doctest::Contains("no class name"), Error); }

    TEST_CASE("parameters are carried after self") {
        const auto m = class_generation({"Account", "-balance: float", "+deposit(amount: float)", "/audit()"});
        CHECK(m.class_methods.size() == 2);
        CHECK(class_file_maker(m) ==
              "class Account:\n"
              "    def __init__(self):\n"
              "        self.balance = None  # type: float  # private\n"
              "\n"
              "    def deposit(self, amount: float):  # public\n"
              "        pass\n"
              "\n"
              "    def audit(self):  # protected\n"
              "        pass\n");
    }

    TEST_CASE("methods only") {
        CHECK(class_file_maker(class_generation({"S", "a()", "b()"})) ==
              "class S:\n    def a(self):  # public\n        pass\n\n    def b(self):  # public\n        pass\n");
    }

    TEST_CASE("identifier sanitization") {
        CHECK(sanitize_identifier("get-Name") == "get_Name");
        CHECK(sanitize_identifier("2fast") == "_2fast");
        CHECK(sanitize_identifier("") == "_");
        CHECK(sanitize_identifier("a b.c") == "a_b_c");
        CHECK(sanitize_identifier("naïve") == "na__ve");
        CHECK(class_file_maker(class_generation({"My Class", "get-Name()", "1st: int"})) ==
              "class My_Class:\n"
              "    def __init__(self):\n"
              "        self._1st = None  # type: int  # public\n"
              "\n"
              "    def get_Name(self):  # public\n"
              "        pass\n");
    }

    TEST_CASE("partition and access totality under fuzzing") {
        std::mt19937 rng(44);
        const std::string alphabet = "ab-+/() :x";
        std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
        std::uniform_int_distribution<int> len(0, 8);
        std::uniform_int_distribution<int> count(1, 12);
        for (int n = 0; n < 1000; ++n) {
            std::vector<std::string> text(static_cast<std::size_t>(count(rng)));
            for (auto& s : text)
                for (int k = len(rng); k > 0; --k) s += alphabet[pick(rng)];
            const auto m = class_generation(text);
            CHECK(m.class_attributes.size() + m.class_methods.size() == text.size() - 1);
            CHECK(class_file_maker(m) == class_file_maker(class_generation(text)));
        }
    }
}

TEST_SUITE("database tables") {
    TEST_CASE("users trace") {
        const auto m = database_generation({"*id int", "name varchar(50)"}, "users");
        CHECK(m.table_attributes == std::vector<Column>{{"id", "int"}, {"name", "varchar(50)"}});
        CHECK(m.primary_keys == std::vector<std::string>{"id"});
        CHECK(create_sql_query(m) == kUsersSql);
    }

    TEST_CASE("no key") {
        const auto m = database_generation({"a int"}, "t");
        CHECK(m.primary_keys.empty());
        CHECK(create_sql_query(m) == "CREATE TABLE t (\n  a int\n);\n");
    }

    TEST_CASE("composite key") {
        const auto m = database_generation({"*a int", "*b int"}, "t");
        CHECK(m.primary_keys == std::vector<std::string>{"a", "b"});
        CHECK(create_sql_query(m) == "CREATE TABLE t (\n  a int,\n  b int,\n  PRIMARY KEY (a, b)\n);\n");
    }

    TEST_CASE("split types are rejoined") {
        const auto m = database_generation({"price   decimal (10, 2)", "id* int"}, "p");
        CHECK(m.table_attributes == std::vector<Column>{{"price", "decimal (10, 2)"}, {"id", "int"}});
        CHECK(m.primary_keys == std::vector<std::string>{"id"});
    }

    TEST_CASE("detached key marker") {
        const auto m = database_generation({"* id int"}, "t");
        CHECK(m.table_attributes == std::vector<Column>{{"id", "int"}});
        CHECK(m.primary_keys == std::vector<std::string>{"id"});
    }

    TEST_CASE("errors") {
        CHECK_THROWS_WITH_AS(database_generation({"id"}, "t"), doctest::Contains("'id'"), Error);
        CHECK_THROWS_AS(database_generation({}, "t"), Error);
        CHECK_THROWS_AS(database_generation({"a int"}, ""), Error);
        CHECK_THROWS_AS(database_generation({"* int"}, "t"), Error);
        CHECK_THROWS_AS(database_generation({"*** int"}, "t"), Error);
    }

    TEST_CASE("generated DDL re-parses to the model") {
        std::mt19937 rng(5);
        std::uniform_int_distribution<int> count(1, 8);
        std::uniform_int_distribution<int> coin(0, 3);
        const std::vector<std::string> types = {"int", "varchar(50)", "decimal (10, 2)", "text", "date"};
        std::uniform_int_distribution<std::size_t> type(0, types.size() - 1);
        for (int n = 0; n < 300; ++n) {
            std::vector<std::string> entries;
            for (int k = count(rng); k > 0; --k)
                entries.push_back(std::string(coin(rng) == 0 ? "*" : "") + "col" + std::to_string(k) + " " + types[type(rng)]);
            const auto m = database_generation(entries, "tbl");
            CHECK(m.table_attributes.size() == entries.size());
            for (const auto& c : m.table_attributes) CHECK(c.attribute.find('*') == std::string::npos);
            for (const auto& k : m.primary_keys)
                CHECK(std::any_of(m.table_attributes.begin(), m.table_attributes.end(),
                                  [&](const Column& c) { return c.attribute == k; }));
            CHECK(reparse_sql(create_sql_query(m)) == m);
        }
    }
}

TEST_SUITE("html") {
    TEST_CASE("empty page") {
        CHECK(html_generate({"blank", 10, 10, {}, {}}) ==
              "<!DOCTYPE html>\n<html>\n<head>\n  <meta charset=\"utf-8\">\n  <title>blank</title>\n</head>\n<body>\n"
              "</body>\n</html>\n");
    }

    TEST_CASE("full document") {
        const ir::PageIr page{"login",
                              100,
                              100,
                              {el(UiClass::Input, "Email"), el(UiClass::Button, "Sign up", "signup"), el(UiClass::Paragraph, "Hi")},
                              {{2}, {0, 1}}};
        CHECK(html_generate(page) ==
              "<!DOCTYPE html>\n"
              "<html>\n"
              "<head>\n"
              "  <meta charset=\"utf-8\">\n"
              "  <title>login</title>\n"
              "</head>\n"
              "<body>\n"
              "  <div class=\"row\">\n"
              "    <p>Hi</p>\n"
              "  </div>\n"
              "  <div class=\"row\">\n"
              "    <input type=\"text\" placeholder=\"Email\">\n"
              "    <button onclick=\"location.href='signup.html'\">Sign up</button>\n"
              "  </div>\n"
              "</body>\n"
              "</html>\n");
    }

    TEST_CASE("tag map") {
        CHECK(only_body_line(el(UiClass::Paragraph)) == "<p></p>");
        CHECK(only_body_line(el(UiClass::Image)) == "<img alt=\"\">");
        CHECK(only_body_line(el(UiClass::Input)) == "<input type=\"text\">");
        CHECK(only_body_line(el(UiClass::Button)) == "<button></button>");
        CHECK(only_body_line(el(UiClass::Hyperlink)) == "<a href=\"#\"></a>");
        CHECK(only_body_line(el(UiClass::Select)) == "<select></select>");
        CHECK(only_body_line(el(UiClass::Table)) == "<table></table>");
        CHECK(only_body_line(el(UiClass::Navbar)) == "<nav></nav>");
        CHECK(only_body_line(el(UiClass::Checkbox, "Remember me")) == "<input type=\"checkbox\"><label>Remember me</label>");
        CHECK(only_body_line(el(UiClass::Radio)) == "<input type=\"radio\"><label></label>");
    }

    TEST_CASE("links") {
        CHECK(only_body_line(el(UiClass::Button, {}, "signup")) == "<button onclick=\"location.href='signup.html'\"></button>");
        CHECK(only_body_line(el(UiClass::Hyperlink, "Home", "index")) == "<a href=\"index.html\">Home</a>");
        CHECK(only_body_line(el(UiClass::Hyperlink, "Go", "js:launch")) == "<a href=\"#\" onclick=\"launch()\">Go</a>");
        CHECK(only_body_line(el(UiClass::Button, "Save", "js:save")) == "<button onclick=\"save()\">Save</button>");
        CHECK(only_body_line(el(UiClass::Image, {}, "gallery")) == "<img alt=\"\" onclick=\"location.href='gallery.html'\">");
    }

    TEST_CASE("escaping") {
        CHECK(only_body_line(el(UiClass::Radio, "a<b")) == "<input type=\"radio\"><label>a&lt;b</label>");
        CHECK(html_escape("<a href=\"x\">&'") == "&lt;a href=&quot;x&quot;&gt;&amp;&#39;");
        CHECK(only_body_line(el(UiClass::Hyperlink, {}, "a\"b")) == "<a href=\"a&quot;b.html\"></a>");
    }

    TEST_CASE("deterministic") {
        const ir::PageIr page{"p", 1, 1, {el(UiClass::Navbar, "Menu"), el(UiClass::Select, "Country")}, {{0, 1}}};
        CHECK(html_generate(page) == html_generate(page));
        CHECK(html_generate(page).find("<select><option>Country</option></select>") != std::string::npos);
    }
}
