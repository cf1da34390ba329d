// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skelgen::detect {

/// Axis-aligned box in pixel coordinates; x_min < x_max and y_min < y_max.
struct Box {
    double x_min = 0;
    double y_min = 0;
    double x_max = 0;
    double y_max = 0;

    double width() const noexcept { return x_max - x_min; }
    double height() const noexcept { return y_max - y_min; }
    double area() const noexcept { return width() * height(); }
    bool valid() const noexcept { return x_min < x_max && y_min < y_max; }

    bool operator==(const Box&) const = default;
};

double intersection_area(const Box& a, const Box& b);
double iou(const Box& a, const Box& b);
/// Overlap divided by the text box's own area.
double ioe(const Box& text_box, const Box& ui_box);

enum class UiClass {
    Paragraph,
    Image,
    Input,
    Button,
    Hyperlink,
    Select,
    Table,
    Navbar,
    Checkbox,
    Radio,
    Linker,
};

inline constexpr std::array<UiClass, 11> kAllUiClasses = {
    UiClass::Paragraph, UiClass::Image,  UiClass::Input,    UiClass::Button, UiClass::Hyperlink, UiClass::Select,
    UiClass::Table,     UiClass::Navbar, UiClass::Checkbox, UiClass::Radio,  UiClass::Linker,
};

std::string_view to_string(UiClass cls);
/// Case-insensitive; std::nullopt for anything outside the closed set.
std::optional<UiClass> parse_ui_class(std::string_view label);

struct UiDetection {
    UiClass cls = UiClass::Paragraph;
    Box box;
    double score = 1.0;

    bool operator==(const UiDetection&) const = default;
};

struct TextDetection {
    Box box;
    double score = 1.0;
    std::optional<std::string> text;

    bool operator==(const TextDetection&) const = default;
};

struct DetectionSet {
    std::string image_id;
    int image_w = 0;
    int image_h = 0;
    std::vector<UiDetection> uis;
    std::vector<TextDetection> texts;

    bool operator==(const DetectionSet&) const = default;
};

/// Pascal-VOC annotation. UI class names become detections with score 1.0;
/// the name "text" becomes a text detection.
DetectionSet parse_voc(const std::filesystem::path& xml_path);
DetectionSet parse_voc_string(const std::string& xml, const std::string& origin = "<memory>");

DetectionSet parse_detections_json(const std::filesystem::path& path);
DetectionSet detections_from_json_text(const std::string& text);
std::string detections_to_json_text(const DetectionSet& set);

/// Loads either format, chosen by extension (.xml is VOC, anything else JSON).
DetectionSet load_detections(const std::filesystem::path& path);

inline constexpr double kIoeThreshold = 0.5;

/// Keeps a text box iff no UI box overlaps it with IoE strictly above
/// `threshold`. Order is preserved.
std::vector<TextDetection> retain_text_boxes(const std::vector<TextDetection>& texts,
                                             const std::vector<UiDetection>& uis,
                                             double threshold = kIoeThreshold);

/// Rank per class; lower rank wins.
using PriorityMap = std::map<UiClass, int>;

PriorityMap default_priorities();
/// Comma-separated class names, highest priority first. Must name every class
/// exactly once.
PriorityMap parse_priorities(std::string_view list);

inline constexpr double kOverlapThreshold = 0.5;

/// Greedy suppression in priority order (rank, then higher score, then index):
/// a detection is dropped when a kept one overlaps it with IoU above
/// `threshold`. Pairs mixing a Linker with a non-Linker never interact.
std::vector<UiDetection> resolve_ui_overlaps(const std::vector<UiDetection>& uis,
                                             const PriorityMap& priorities = default_priorities(),
                                             double threshold = kOverlapThreshold);

}  // namespace skelgen::detect
