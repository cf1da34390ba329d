// SPDX-License-Identifier: Apache-2.0

#include "skelgen/table_structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace skelgen::table {

using raster::BinaryImage;
using raster::GrayImage;
using raster::StructKernel;

int line_kernel_length(int image_width) { return std::max(2, image_width / 50); }

BinaryImage extract_lines(const BinaryImage& bin, LineOrientation orientation) {
    const int n = line_kernel_length(bin.width());
    const StructKernel k = orientation == LineOrientation::Horizontal ? StructKernel{n, 1} : StructKernel{1, n};
    return raster::dilate(raster::erode(bin, k), k);
}

BinaryImage reconstruct_grid(const BinaryImage& horiz, const BinaryImage& vert) {
    if (horiz.width() != vert.width() || horiz.height() != vert.height()) {
        throw std::invalid_argument("reconstruct_grid: dimension mismatch");
    }
    // lines as 255 on 0
    const auto merged = raster::weighted_sum(raster::to_gray(horiz, 255, 0), raster::to_gray(vert, 255, 0), 0.5, 0.5);
    const auto eroded = raster::erode(merged, StructKernel{2, 2});
    const int t = raster::otsu_level(eroded);
    // bright pixels are the lattice
    return raster::global_threshold(eroded, t, false);
}

std::vector<CellBox> find_contours(const BinaryImage& grid) {
    const int w = grid.width();
    const int h = grid.height();
    std::vector<int> label(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
    auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x); };

    std::vector<CellBox> boxes;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (grid.at(x, y) || label[idx(x, y)] >= 0) continue;
            const int id = static_cast<int>(boxes.size());
            int x0 = x, x1 = x, y0 = y, y1 = y;
            label[idx(x, y)] = id;
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                x0 = std::min(x0, cx);
                x1 = std::max(x1, cx);
                y0 = std::min(y0, cy);
                y1 = std::max(y1, cy);
                constexpr int dx[] = {1, -1, 0, 0};
                constexpr int dy[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = cx + dx[k];
                    const int ny = cy + dy[k];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    if (grid.at(nx, ny) || label[idx(nx, ny)] >= 0) continue;
                    label[idx(nx, ny)] = id;
                    stack.emplace_back(nx, ny);
                }
            }
            boxes.push_back({x0, y0, x1 - x0 + 1, y1 - y0 + 1});
        }
    }
    return boxes;
}

FilteredCells filter_cells(const std::vector<CellBox>& boxes, int image_height, int min_cell_px) {
    FilteredCells out;
    const double max_h = kMaxCellHeightFraction * image_height;
    for (const auto& b : boxes) {
        if (b.h >= min_cell_px && b.h <= max_h) {
            out.valid.push_back(b);
        }
    }
    if (!out.valid.empty()) {
        const double total = std::accumulate(out.valid.begin(), out.valid.end(), 0.0,
                                             [](double acc, const CellBox& b) { return acc + b.h; });
        out.mean_height = total / static_cast<double>(out.valid.size());
    }
    return out;
}

GridExtraction classify_rows(const std::vector<CellBox>& valid, double mean_height) {
    GridExtraction out;
    out.mean_height = mean_height;
    if (valid.empty()) return out;

    auto sorted = valid;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const CellBox& a, const CellBox& b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });

    std::vector<std::vector<CellBox>> rows;
    int anchor_y = 0;
    for (const auto& b : sorted) {
        if (rows.empty() || std::abs(b.y - anchor_y) > mean_height / 2.0) {
            rows.emplace_back();
            anchor_y = b.y;
        }
        rows.back().push_back(b);
    }
    for (auto& row : rows) {
        std::stable_sort(row.begin(), row.end(), [](const CellBox& a, const CellBox& b) { return a.x < b.x; });
        auto& indices = out.rows.emplace_back();
        for (const auto& b : row) {
            indices.push_back(static_cast<int>(out.cells.size()));
            out.cells.push_back(b);
        }
    }
    return out;
}

GrayImage extract_cell_roi(const GrayImage& gray, const CellBox& cell, int pad) {
    if (cell.x < 0 || cell.y < 0 || cell.x + cell.w > gray.width() || cell.y + cell.h > gray.height()) {
        throw std::out_of_range("extract_cell_roi: cell outside image");
    }
    const int w = cell.w - 2 * pad;
    const int h = cell.h - 2 * pad;
    if (pad < 0 || w < 1 || h < 1) {
        throw std::invalid_argument("empty ROI");
    }
    auto roi = raster::crop(gray, cell.x + pad, cell.y + pad, w, h);

    const auto ink = raster::otsu_threshold(roi);
    if (ink.constant) return roi;
    const auto kept = raster::open(ink.image, StructKernel{2, 2});

    // specks take the mean background luminance
    std::uint64_t bg_sum = 0;
    std::uint64_t bg_n = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!ink.image.at(x, y)) {
                bg_sum += roi.at(x, y);
                ++bg_n;
            }
        }
    }
    if (bg_n == 0) return roi;
    const auto fill = static_cast<std::uint8_t>((bg_sum + bg_n / 2) / bg_n);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (ink.image.at(x, y) && !kept.at(x, y)) {
                roi.at(x, y) = fill;
            }
        }
    }
    return roi;
}

TableResult extract_table(const GrayImage& gray, const TableOptions& options) {
    TableResult r;
    const auto ink = raster::otsu_threshold(gray);
    r.ink_is_dark = ink.ink_is_dark;
    r.masks.binary = ink.image;
    r.masks.hlines = extract_lines(ink.image, LineOrientation::Horizontal);
    r.masks.vlines = extract_lines(ink.image, LineOrientation::Vertical);
    r.masks.grid = reconstruct_grid(r.masks.hlines, r.masks.vlines);

    const auto contours = find_contours(r.masks.grid);
    const auto filtered = filter_cells(contours, gray.height(), options.min_cell_px);
    r.grid = classify_rows(filtered.valid, filtered.mean_height);
    return r;
}

}  // namespace skelgen::table
