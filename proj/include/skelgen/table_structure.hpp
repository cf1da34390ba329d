// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "skelgen/raster.hpp"

namespace skelgen::table {

struct CellBox {
    int x = 0;
    int y = 0;
    int w = 1;
    int h = 1;

    bool operator==(const CellBox&) const = default;
};

struct GridExtraction {
    std::vector<CellBox> cells;             // row-major
    double mean_height = 0.0;
    std::vector<std::vector<int>> rows;     // indices into cells
};

enum class LineOrientation { Horizontal, Vertical };

/// Line kernel length for an image: max(2, floor(width / 50)).
int line_kernel_length(int image_width);

/// Opening with a 1xN (horizontal) or Nx1 (vertical) line kernel.
raster::BinaryImage extract_lines(const raster::BinaryImage& bin, LineOrientation orientation);

/// Merges the two line masks at equal weight, erodes with a 2x2 kernel and
/// thresholds the result (Otsu) back into a line mask.
raster::BinaryImage reconstruct_grid(const raster::BinaryImage& horiz, const raster::BinaryImage& vert);

/// Bounding boxes of the connected non-line regions of a grid mask, in
/// scanline discovery order. Regions are 4-connected so that they cannot leak
/// across an 8-connected line.
std::vector<CellBox> find_contours(const raster::BinaryImage& grid);

inline constexpr int kMinCellPx = 8;
inline constexpr double kMaxCellHeightFraction = 0.9;

struct FilteredCells {
    std::vector<CellBox> valid;
    double mean_height = 0.0;
};

FilteredCells filter_cells(const std::vector<CellBox>& boxes, int image_height, int min_cell_px = kMinCellPx);

GridExtraction classify_rows(const std::vector<CellBox>& valid, double mean_height);

inline constexpr int kRoiPad = 2;

/// Crops `cell` shrunk by `pad` on every side and clears specks that do not
/// survive a 2x2 opening. Throws std::invalid_argument("empty ROI") when the
/// padded cell is degenerate.
raster::GrayImage extract_cell_roi(const raster::GrayImage& gray, const CellBox& cell, int pad = kRoiPad);

struct TableOptions {
    int min_cell_px = kMinCellPx;
};

struct TableMasks {
    raster::BinaryImage binary;
    raster::BinaryImage hlines;
    raster::BinaryImage vlines;
    raster::BinaryImage grid;
};

struct TableResult {
    GridExtraction grid;
    TableMasks masks;
    bool ink_is_dark = true;
};

/// Full pipeline: Otsu binarization, line extraction, grid merge, contours,
/// height filter and row grouping.
TableResult extract_table(const raster::GrayImage& gray, const TableOptions& options = {});

}  // namespace skelgen::table
