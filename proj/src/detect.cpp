// SPDX-License-Identifier: Apache-2.0

#include "skelgen/detect.hpp"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json_fields.hpp"
#include "skelgen/error.hpp"

namespace skelgen::detect {

namespace jf = json_fields;
using nlohmann::ordered_json;

// ---- geometry --------------------------------------------------------------

double intersection_area(const Box& a, const Box& b) {
    const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (w <= 0 || h <= 0) return 0.0;
    return w * h;
}

double iou(const Box& a, const Box& b) {
    const double inter = intersection_area(a, b);
    if (inter == 0.0) return 0.0;
    return inter / (a.area() + b.area() - inter);
}

double ioe(const Box& text_box, const Box& ui_box) {
    const double area = text_box.area();
    if (area <= 0) return 0.0;
    return intersection_area(text_box, ui_box) / area;
}

// ---- classes ---------------------------------------------------------------

std::string_view to_string(UiClass cls) {
    switch (cls) {
        case UiClass::Paragraph: return "Paragraph";
        case UiClass::Image: return "Image";
        case UiClass::Input: return "Input";
        case UiClass::Button: return "Button";
        case UiClass::Hyperlink: return "Hyperlink";
        case UiClass::Select: return "Select";
        case UiClass::Table: return "Table";
        case UiClass::Navbar: return "Navbar";
        case UiClass::Checkbox: return "Checkbox";
        case UiClass::Radio: return "Radio";
        case UiClass::Linker: return "Linker";
    }
    return "?";
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::optional<UiClass> parse_ui_class(std::string_view label) {
    for (auto cls : kAllUiClasses) {
        if (iequals(label, to_string(cls))) return cls;
    }
    return std::nullopt;
}

// ---- VOC -------------------------------------------------------------------

namespace {

namespace pt = boost::property_tree;

double voc_coord(const pt::ptree& bndbox, const char* key, const std::string& origin) {
    const auto v = bndbox.get_optional<std::string>(key);
    if (!v) throw parse_error(origin + ": object bndbox missing <" + key + ">");
    try {
        std::size_t used = 0;
        const auto s = trim(*v);
        const double d = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return d;
    } catch (const std::exception&) {
        throw parse_error(origin + ": bad <" + key + "> value '" + *v + "'");
    }
}

void check_inside(const Box& b, int w, int h, const std::string& where) {
    if (b.x_min < 0 || b.y_min < 0 || b.x_max > w || b.y_max > h) {
        throw parse_error(where + ": box outside image");
    }
}

}  // namespace

DetectionSet parse_voc_string(const std::string& xml, const std::string& origin) {
    pt::ptree tree;
    try {
        std::istringstream in(xml);
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw parse_error(origin + ": malformed XML (line " + std::to_string(e.line()) + ": " + e.message() + ")");
    }
    const auto root = tree.get_child_optional("annotation");
    if (!root) throw parse_error(origin + ": malformed XML (missing <annotation>)");

    DetectionSet set;
    const auto filename = root->get_optional<std::string>("filename");
    set.image_id = filename ? std::filesystem::path(trim(*filename)).stem().string()
                            : std::filesystem::path(origin).stem().string();
    try {
        set.image_w = root->get<int>("size.width");
        set.image_h = root->get<int>("size.height");
    } catch (const pt::ptree_error&) {
        throw parse_error(origin + ": missing or invalid <size>");
    }
    if (set.image_w < 1 || set.image_h < 1) throw parse_error(origin + ": invalid <size>");

    std::vector<std::string> unknown;
    for (const auto& [tag, node] : *root) {
        if (tag != "object") continue;
        const auto name = trim(node.get<std::string>("name", ""));
        const auto bndbox = node.get_child_optional("bndbox");
        if (!bndbox) throw parse_error(origin + ": object '" + name + "' has no <bndbox>");
        Box box{voc_coord(*bndbox, "xmin", origin), voc_coord(*bndbox, "ymin", origin),
                voc_coord(*bndbox, "xmax", origin), voc_coord(*bndbox, "ymax", origin)};
        if (box.x_min >= box.x_max || box.y_min >= box.y_max) {
            throw parse_error(origin + ": inverted box for object '" + name + "'");
        }
        check_inside(box, set.image_w, set.image_h, origin + ": object '" + name + "'");

        if (iequals(name, "text")) {
            set.texts.push_back({box, 1.0, std::nullopt});
        } else if (auto cls = parse_ui_class(name)) {
            set.uis.push_back({*cls, box, 1.0});
        } else if (std::find(unknown.begin(), unknown.end(), name) == unknown.end()) {
            unknown.push_back(name);
        }
    }
    if (!unknown.empty()) {
        std::string list;
        for (const auto& n : unknown) list += (list.empty() ? "" : ", ") + n;
        throw parse_error(origin + ": unknown class: " + list);
    }
    return set;
}

DetectionSet parse_voc(const std::filesystem::path& xml_path) {
    std::ifstream in(xml_path);
    if (!in) throw io_error(xml_path.string() + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_voc_string(ss.str(), xml_path.string());
}

// ---- JSON interchange ------------------------------------------------------

namespace {

Box box_from_json(const nlohmann::json& v, const std::string& ptr) {
    jf::array_at(v, ptr);
    if (v.size() != 4) jf::fail(ptr, "expected [x_min, y_min, x_max, y_max]");
    Box b{jf::as_number(v[0], jf::child(ptr, 0)), jf::as_number(v[1], jf::child(ptr, 1)),
          jf::as_number(v[2], jf::child(ptr, 2)), jf::as_number(v[3], jf::child(ptr, 3))};
    if (!b.valid()) jf::fail(ptr, "inverted box");
    return b;
}

double score_from_json(const nlohmann::json& v, const std::string& ptr) {
    const double s = jf::as_number(v, ptr);
    if (s < 0.0 || s > 1.0) jf::fail(ptr, "score outside [0,1]");
    return s;
}

ordered_json box_to_json(const Box& b) {
    return ordered_json::array({jf::number(b.x_min), jf::number(b.y_min), jf::number(b.x_max), jf::number(b.y_max)});
}

void check_inside_json(const Box& b, const DetectionSet& set, const std::string& ptr) {
    if (b.x_min < 0 || b.y_min < 0 || b.x_max > set.image_w || b.y_max > set.image_h) {
        jf::fail(ptr, "box outside image");
    }
}

}  // namespace

DetectionSet detections_from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("malformed JSON: ") + e.what());
    }
    DetectionSet set;
    set.image_id = jf::as_string(jf::member(doc, "", "image_id"), "/image_id");
    set.image_w = jf::as_int(jf::member(doc, "", "image_w"), "/image_w");
    set.image_h = jf::as_int(jf::member(doc, "", "image_h"), "/image_h");
    if (set.image_w < 1) jf::fail("/image_w", "must be >= 1");
    if (set.image_h < 1) jf::fail("/image_h", "must be >= 1");

    const auto& uis = jf::array_at(jf::member(doc, "", "uis"), "/uis");
    for (std::size_t i = 0; i < uis.size(); ++i) {
        const auto ptr = jf::child("/uis", i);
        const auto& u = uis[i];
        const auto label = jf::as_string(jf::member(u, ptr, "class"), ptr + "/class");
        const auto cls = parse_ui_class(label);
        if (!cls) jf::fail(ptr + "/class", "unknown class: " + label);
        UiDetection d{*cls, box_from_json(jf::member(u, ptr, "box"), ptr + "/box"),
                      score_from_json(jf::member(u, ptr, "score"), ptr + "/score")};
        check_inside_json(d.box, set, ptr + "/box");
        set.uis.push_back(d);
    }

    const auto& texts = jf::array_at(jf::member(doc, "", "texts"), "/texts");
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const auto ptr = jf::child("/texts", i);
        const auto& t = texts[i];
        TextDetection d{box_from_json(jf::member(t, ptr, "box"), ptr + "/box"),
                        score_from_json(jf::member(t, ptr, "score"), ptr + "/score"), std::nullopt};
        check_inside_json(d.box, set, ptr + "/box");
        if (auto it = t.find("text"); it != t.end() && !it->is_null()) {
            d.text = jf::as_string(*it, ptr + "/text");
        }
        set.texts.push_back(std::move(d));
    }
    return set;
}

std::string detections_to_json_text(const DetectionSet& set) {
    ordered_json doc;
    doc["image_id"] = set.image_id;
    doc["image_w"] = set.image_w;
    doc["image_h"] = set.image_h;
    doc["uis"] = ordered_json::array();
    for (const auto& u : set.uis) {
        ordered_json e;
        e["class"] = std::string(to_string(u.cls));
        e["box"] = box_to_json(u.box);
        e["score"] = jf::number(u.score);
        doc["uis"].push_back(std::move(e));
    }
    doc["texts"] = ordered_json::array();
    for (const auto& t : set.texts) {
        ordered_json e;
        e["box"] = box_to_json(t.box);
        e["score"] = jf::number(t.score);
        e["text"] = t.text ? ordered_json(*t.text) : ordered_json(nullptr);
        doc["texts"].push_back(std::move(e));
    }
    return doc.dump(2) + "\n";
}

DetectionSet parse_detections_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path.string() + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return detections_from_json_text(ss.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

DetectionSet load_detections(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".xml" ? parse_voc(path) : parse_detections_json(path);
}

// ---- filtering -------------------------------------------------------------

std::vector<TextDetection> retain_text_boxes(const std::vector<TextDetection>& texts,
                                             const std::vector<UiDetection>& uis, double threshold) {
    std::vector<TextDetection> kept;
    for (const auto& t : texts) {
        const bool signature = std::any_of(uis.begin(), uis.end(),
                                           [&](const UiDetection& u) { return ioe(t.box, u.box) > threshold; });
        if (!signature) kept.push_back(t);
    }
    return kept;
}

PriorityMap default_priorities() {
    static constexpr UiClass order[] = {UiClass::Navbar,    UiClass::Table,    UiClass::Select, UiClass::Input,
                                        UiClass::Button,    UiClass::Hyperlink, UiClass::Checkbox, UiClass::Radio,
                                        UiClass::Image,     UiClass::Paragraph, UiClass::Linker};
    PriorityMap m;
    int rank = 0;
    for (auto c : order) m[c] = rank++;
    return m;
}

PriorityMap parse_priorities(std::string_view list) {
    PriorityMap m;
    int rank = 0;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto end = std::min(list.find(',', start), list.size());
        const auto name = trim(list.substr(start, end - start));
        const auto cls = parse_ui_class(name);
        if (!cls) throw parse_error("priorities: unknown class: " + name);
        if (m.count(*cls)) throw parse_error("priorities: duplicate class: " + name);
        m[*cls] = rank++;
        start = end + 1;
    }
    if (m.size() != kAllUiClasses.size()) {
        throw parse_error("priorities: every class must be ranked exactly once");
    }
    return m;
}

std::vector<UiDetection> resolve_ui_overlaps(const std::vector<UiDetection>& uis, const PriorityMap& priorities,
                                             double threshold) {
    auto rank = [&](UiClass c) {
        auto it = priorities.find(c);
        return it == priorities.end() ? static_cast<int>(kAllUiClasses.size()) : it->second;
    };
    std::vector<std::size_t> order(uis.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const int ra = rank(uis[a].cls);
        const int rb = rank(uis[b].cls);
        if (ra != rb) return ra < rb;
        if (uis[a].score != uis[b].score) return uis[a].score > uis[b].score;
        return a < b;
    });

    std::vector<bool> keep(uis.size(), false);
    std::vector<std::size_t> kept;
    for (auto i : order) {
        const bool i_linker = uis[i].cls == UiClass::Linker;
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            if ((uis[k].cls == UiClass::Linker) != i_linker) return false;
            return iou(uis[k].box, uis[i].box) > threshold;
        });
        if (!suppressed) {
            keep[i] = true;
            kept.push_back(i);
        }
    }
    std::vector<UiDetection> out;
    for (std::size_t i = 0; i < uis.size(); ++i) {
        if (keep[i]) out.push_back(uis[i]);
    }
    return out;
}

}  // namespace skelgen::detect
