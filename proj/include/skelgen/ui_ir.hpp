// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skelgen/detect.hpp"
#include "skelgen/ocr.hpp"
#include "skelgen/raster.hpp"

namespace skelgen::ir {

struct PageElement {
    detect::UiClass cls = detect::UiClass::Paragraph;
    detect::Box box;
    std::optional<std::string> text;
    // A page name, or "js:<function>" for a script action.
    std::optional<std::string> link_target;

    bool operator==(const PageElement&) const = default;
};

using Rows = std::vector<std::vector<int>>;

struct PageIr {
    std::string image_id;
    int canvas_w = 0;
    int canvas_h = 0;
    std::vector<PageElement> elements;
    Rows rows;  // partition of element indices; top to bottom, left to right

    bool operator==(const PageIr&) const = default;
};

inline constexpr double kAttachFloor = 0.25;

struct BuildResult {
    PageIr ir;
    std::vector<std::string> warnings;
};

/// Assembles the page IR.
///
/// Recognition order is fixed: the retained text boxes in input order, then
/// the Linker boxes in input order. Each region is cropped from `page` (boxes
/// are clamped to the canvas).
///
/// A recognized text joins the non-Linker UI element it overlaps most (by
/// IoE, earliest element on ties) when that overlap reaches `attach_floor`;
/// otherwise it becomes a standalone Paragraph. Empty recognitions are
/// dropped. A Linker's text becomes the link target of the element its box
/// overlaps most (ties to the higher score). Linkers never become elements.
BuildResult build_ir(const detect::DetectionSet& dets, const std::vector<detect::TextDetection>& retained,
                     const raster::GrayImage& page, ocr::Recognizer& recognizer,
                     double attach_floor = kAttachFloor);

/// Elements share a row when their vertical overlap is at least half the
/// smaller height; rows are the transitive closure of that relation.
Rows infer_layout(const std::vector<PageElement>& elements);

/// Canonical JSON, two-space indent, trailing newline.
std::string serialize_ir(const PageIr& ir);
PageIr deserialize_ir(const std::string& text);

}  // namespace skelgen::ir
