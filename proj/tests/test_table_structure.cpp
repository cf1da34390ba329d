// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <tuple>
#include <random>

#include "render.hpp"
#include "skelgen/table_structure.hpp"

using namespace skelgen;
using namespace skelgen::table;
using raster::BinaryImage;
using raster::GrayImage;

namespace {

BinaryImage ink_of(const GrayImage& g) { return raster::global_threshold(g, 128, true); }

GrayImage invert_gray(const GrayImage& g) {
    auto out = g;
    for (auto& v : out.data()) v = static_cast<std::uint8_t>(255 - v);
    return out;
}

bool within(const CellBox& got, const CellBox& want, int tol) {
    return std::abs(got.x - want.x) <= tol && std::abs(got.y - want.y) <= tol &&
           std::abs(got.x + got.w - want.x - want.w) <= tol && std::abs(got.y + got.h - want.y - want.h) <= tol;
}

}  // namespace

TEST_CASE("kernel length floor") {
    CHECK(line_kernel_length(200) == 4);
    CHECK(line_kernel_length(99) == 2);
    CHECK(line_kernel_length(10) == 2);
    CHECK(line_kernel_length(1000) == 20);
}

TEST_CASE("extract_lines keeps rules and drops text") {
    GrayImage g(200, 40, 255);
    testing::fill_rect(g, 0, 20, 200, 2, 0);
    for (int x = 5; x < 190; x += 9) testing::fill_rect(g, x, 5, 3, 3, 0);
    const auto bin = ink_of(g);

    const auto h = extract_lines(bin, LineOrientation::Horizontal);
    for (int x = 0; x < 200; ++x) {
        CHECK(h.at(x, 20));
        CHECK(h.at(x, 21));
    }
    CHECK(h.count() == 400);

    CHECK(extract_lines(bin, LineOrientation::Vertical).none());
    CHECK(extract_lines(BinaryImage(120, 30), LineOrientation::Horizontal).none());
}

TEST_CASE("reconstruct_grid") {
    SUBCASE("both blank") { CHECK(reconstruct_grid(BinaryImage(40, 30), BinaryImage(40, 30)).none()); }

    SUBCASE("horizontal only: eroded rules survive") {
        BinaryImage h(60, 30);
        for (int x = 0; x < 60; ++x) {
            h.set(x, 10, true);
            h.set(x, 11, true);
            h.set(x, 12, true);
        }
        const auto grid = reconstruct_grid(h, BinaryImage(60, 30));
        // 2x2 erosion trims the last row and column of the rule
        for (int x = 0; x < 59; ++x) {
            CHECK(grid.at(x, 10));
            CHECK(grid.at(x, 11));
            CHECK_FALSE(grid.at(x, 12));
        }
        CHECK(grid.count() == 2 * 59);
    }

    SUBCASE("full lattice closes every cell") {
        testing::TableStyle style;
        style.margin = 10;
        const auto t = testing::render_single_column_table(3, style);
        const auto bin = ink_of(t.image);
        const auto grid =
            reconstruct_grid(extract_lines(bin, LineOrientation::Horizontal), extract_lines(bin, LineOrientation::Vertical));
        const auto boxes = find_contours(grid);
        REQUIRE(boxes.size() == 4);  // outer ring + 3 interiors
        CHECK(boxes[0] == CellBox{0, 0, t.image.width(), t.image.height()});
        for (int k = 0; k < 3; ++k) CHECK(within(boxes[static_cast<std::size_t>(k) + 1], t.interiors[static_cast<std::size_t>(k)], 1));
    }

    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(reconstruct_grid(BinaryImage(3, 3), BinaryImage(3, 4)), std::invalid_argument);
    }
}

TEST_CASE("find_contours") {
    SUBCASE("blank image is one region") {
        const auto boxes = find_contours(BinaryImage(17, 9));
        REQUIRE(boxes.size() == 1);
        CHECK(boxes[0] == CellBox{0, 0, 17, 9});
    }

    SUBCASE("single 50x20 interior") {
        BinaryImage b(70, 40);
        for (int x = 5; x < 57; ++x) {
            b.set(x, 5, true);
            b.set(x, 26, true);
        }
        for (int y = 5; y < 27; ++y) {
            b.set(5, y, true);
            b.set(56, y, true);
        }
        const auto boxes = find_contours(b);
        REQUIRE(boxes.size() == 2);
        CHECK(boxes[1] == CellBox{6, 6, 50, 20});
    }

    SUBCASE("4-connectivity does not cross a diagonal stroke") {
        BinaryImage b(4, 4);
        for (int i = 0; i < 4; ++i) b.set(i, i, true);
        CHECK(find_contours(b).size() == 2);
    }

    SUBCASE("scanline discovery order") {
        BinaryImage b(5, 3, true);
        b.set(3, 0, false);
        b.set(0, 2, false);
        b.set(1, 1, false);
        const auto boxes = find_contours(b);
        REQUIRE(boxes.size() == 3);
        CHECK(boxes[0] == CellBox{3, 0, 1, 1});
        CHECK(boxes[1] == CellBox{1, 1, 1, 1});
        CHECK(boxes[2] == CellBox{0, 2, 1, 1});
    }
}

TEST_CASE("filter_cells") {
    const auto r = filter_cells({{0, 0, 10, 200}, {0, 0, 10, 20}, {0, 0, 10, 22}, {0, 0, 10, 21}}, 220);
    REQUIRE(r.valid.size() == 3);
    CHECK(r.mean_height == doctest::Approx(21.0));

    const auto empty = filter_cells({}, 100);
    CHECK(empty.valid.empty());
    CHECK(empty.mean_height == 0.0);

    const auto tiny = filter_cells({{0, 0, 5, 4}, {3, 3, 5, 4}}, 100);
    CHECK(tiny.valid.empty());
    CHECK(tiny.mean_height == 0.0);

    // inclusive bounds at both ends
    CHECK(filter_cells({{0, 0, 1, 8}, {0, 0, 1, 90}, {0, 0, 1, 91}}, 100).valid.size() == 2);
    CHECK(filter_cells({{0, 0, 1, 5}}, 100, 5).valid.size() == 1);
}

TEST_CASE("classify_rows") {
    SUBCASE("half mean height rule") {
        const auto g = classify_rows({{0, 10, 5, 20}, {10, 12, 5, 20}, {0, 40, 5, 20}}, 20.0);
        REQUIRE(g.rows.size() == 2);
        CHECK(g.rows[0] == std::vector<int>{0, 1});
        CHECK(g.rows[1] == std::vector<int>{2});
        CHECK(g.mean_height == 20.0);
    }
    SUBCASE("single box") {
        const auto g = classify_rows({{3, 4, 5, 6}}, 6.0);
        CHECK(g.rows == std::vector<std::vector<int>>{{0}});
        CHECK(g.cells == std::vector<CellBox>{{3, 4, 5, 6}});
    }
    SUBCASE("x order within a row") {
        const auto g = classify_rows({{100, 0, 5, 10}, {5, 0, 5, 10}}, 10.0);
        REQUIRE(g.cells.size() == 2);
        CHECK(g.cells[0].x == 5);
        CHECK(g.cells[1].x == 100);
    }
    SUBCASE("exact half distance joins the row") {
        CHECK(classify_rows({{0, 0, 1, 10}, {1, 5, 1, 10}}, 10.0).rows.size() == 1);
        CHECK(classify_rows({{0, 0, 1, 10}, {1, 6, 1, 10}}, 10.0).rows.size() == 2);
    }
    SUBCASE("partition on random inputs") {
        std::mt19937 rng(21);
        std::uniform_int_distribution<int> coord(0, 300);
        std::uniform_int_distribution<int> size(8, 40);
        std::uniform_int_distribution<int> count(0, 30);
        for (int n = 0; n < 200; ++n) {
            std::vector<CellBox> boxes(static_cast<std::size_t>(count(rng)));
            for (auto& b : boxes) b = {coord(rng), coord(rng), size(rng), size(rng)};
            const auto f = filter_cells(boxes, 400);
            const auto g = classify_rows(f.valid, f.mean_height);

            std::vector<int> seen;
            double prev_y = -1;
            for (const auto& row : g.rows) {
                REQUIRE_FALSE(row.empty());
                const double y = g.cells[static_cast<std::size_t>(row[0])].y;
                CHECK(y > prev_y);
                prev_y = y;
                for (int i : row) seen.push_back(i);
                for (std::size_t k = 1; k < row.size(); ++k)
                    CHECK(g.cells[static_cast<std::size_t>(row[k - 1])].x <= g.cells[static_cast<std::size_t>(row[k])].x);
            }
            std::vector<int> expect(g.cells.size());
            std::iota(expect.begin(), expect.end(), 0);
            CHECK(seen == expect);

            auto key = [](const CellBox& b) { return std::tuple(b.x, b.y, b.w, b.h); };
            std::vector<std::tuple<int, int, int, int>> a, b;
            for (const auto& c : f.valid) a.push_back(key(c));
            for (const auto& c : g.cells) b.push_back(key(c));
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
        }
    }
}

TEST_CASE("extract_cell_roi") {
    GrayImage g(80, 40, 250);
    const CellBox cell{10, 5, 50, 20};

    SUBCASE("padding arithmetic") {
        const auto roi = extract_cell_roi(g, cell);
        CHECK(roi.width() == 46);
        CHECK(roi.height() == 16);
    }

    SUBCASE("isolated speck is cleared, strokes survive") {
        testing::fill_rect(g, 20, 10, 6, 4, 10);  // stroke
        g.at(45, 15) = 10;                        // speck
        const auto roi = extract_cell_roi(g, cell);
        CHECK(roi.at(45 - 12, 15 - 7) == 250);
        CHECK(roi.at(20 - 12, 10 - 7) == 10);
        CHECK(roi.at(25 - 12, 13 - 7) == 10);
    }

    SUBCASE("degenerate after padding") {
        CHECK_THROWS_WITH_AS(extract_cell_roi(g, {0, 0, 4, 20}, 2), "empty ROI", std::invalid_argument);
        CHECK_THROWS_WITH_AS(extract_cell_roi(g, {0, 0, 30, 10}, 5), "empty ROI", std::invalid_argument);
    }
}

TEST_CASE("full pipeline recovers rendered tables") {
    for (int rows = 1; rows <= 10; ++rows) {
        for (int line = 2; line <= 4; ++line) {
            testing::TableStyle style;
            style.line = line;
            style.glyphs = true;
            const auto t = testing::render_single_column_table(rows, style);
            CAPTURE(rows);
            CAPTURE(line);
            const auto r = extract_table(t.image);
            REQUIRE(r.grid.cells.size() == static_cast<std::size_t>(rows));
            CHECK(r.grid.rows.size() == static_cast<std::size_t>(rows));
            for (int k = 0; k < rows; ++k)
                CHECK(within(r.grid.cells[static_cast<std::size_t>(k)], t.interiors[static_cast<std::size_t>(k)], 2));
        }
    }
}

TEST_CASE("pipeline is invariant under inversion") {
    for (int rows : {1, 3, 6}) {
        testing::TableStyle style;
        style.glyphs = true;
        style.line = 3;
        const auto t = testing::render_single_column_table(rows, style);
        const auto a = extract_table(t.image);
        const auto b = extract_table(invert_gray(t.image));
        CHECK(a.ink_is_dark);
        CHECK_FALSE(b.ink_is_dark);
        CHECK(a.grid.cells == b.grid.cells);
        CHECK(a.grid.rows == b.grid.rows);
    }
}

TEST_CASE("blank page has no cells") { CHECK(extract_table(GrayImage(200, 90, 255)).grid.cells.empty()); }
