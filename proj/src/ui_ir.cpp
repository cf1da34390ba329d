// SPDX-License-Identifier: Apache-2.0

#include "skelgen/ui_ir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json_fields.hpp"
#include "skelgen/error.hpp"

namespace skelgen::ir {

namespace jf = json_fields;
using detect::Box;
using detect::UiClass;
using nlohmann::ordered_json;

namespace {

raster::GrayImage crop_box(const raster::GrayImage& page, const Box& b) {
    const int w = page.width();
    const int h = page.height();
    int x0 = std::clamp(static_cast<int>(std::floor(b.x_min)), 0, w - 1);
    int y0 = std::clamp(static_cast<int>(std::floor(b.y_min)), 0, h - 1);
    int x1 = std::clamp(static_cast<int>(std::ceil(b.x_max)), x0 + 1, w);
    int y1 = std::clamp(static_cast<int>(std::ceil(b.y_max)), y0 + 1, h);
    return raster::crop(page, x0, y0, x1 - x0, y1 - y0);
}

std::string describe(const Box& b) {
    auto n = [](double v) {
        auto s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    return "[" + n(b.x_min) + "," + n(b.y_min) + "," + n(b.x_max) + "," + n(b.y_max) + "]";
}

}  // namespace

BuildResult build_ir(const detect::DetectionSet& dets, const std::vector<detect::TextDetection>& retained,
                     const raster::GrayImage& page, ocr::Recognizer& recognizer, double attach_floor) {
    BuildResult out;
    auto& ir = out.ir;
    ir.image_id = dets.image_id;
    ir.canvas_w = dets.image_w;
    ir.canvas_h = dets.image_h;

    std::vector<double> scores;  // parallel to ir.elements
    std::vector<const detect::UiDetection*> linkers;
    for (const auto& u : dets.uis) {
        if (u.cls == UiClass::Linker) {
            linkers.push_back(&u);
            continue;
        }
        ir.elements.push_back({u.cls, u.box, std::nullopt, std::nullopt});
        scores.push_back(u.score);
    }
    const std::size_t ui_count = ir.elements.size();

    recognizer.begin_page(dets.image_id);

    for (const auto& t : retained) {
        auto text = ocr::trim_output(recognizer.recognize(crop_box(page, t.box)).text);
        if (text.empty()) continue;

        std::size_t best = ui_count;
        double best_ioe = -1.0;
        for (std::size_t i = 0; i < ui_count; ++i) {
            const double v = detect::ioe(t.box, ir.elements[i].box);
            if (v > best_ioe) {
                best_ioe = v;
                best = i;
            }
        }
        if (best < ui_count && best_ioe >= attach_floor) {
            auto& slot = ir.elements[best].text;
            slot = slot ? *slot + " " + text : text;
        } else {
            ir.elements.push_back({UiClass::Paragraph, t.box, text, std::nullopt});
            scores.push_back(t.score);
        }
    }

    for (const auto* l : linkers) {
        auto target = ocr::trim_output(recognizer.recognize(crop_box(page, l->box)).text);
        std::size_t best = ir.elements.size();
        double best_ioe = 0.0;
        for (std::size_t i = 0; i < ir.elements.size(); ++i) {
            const double v = detect::ioe(l->box, ir.elements[i].box);
            if (v <= 0.0) continue;
            if (best == ir.elements.size() || v > best_ioe || (v == best_ioe && scores[i] > scores[best])) {
                best = i;
                best_ioe = v;
            }
        }
        if (best == ir.elements.size()) {
            out.warnings.push_back("Linker at " + describe(l->box) + " overlaps no element; dropped");
            continue;
        }
        if (target.empty()) {
            out.warnings.push_back("Linker at " + describe(l->box) + " has no readable target; dropped");
            continue;
        }
        ir.elements[best].link_target = target;
    }

    ir.rows = infer_layout(ir.elements);
    return out;
}

Rows infer_layout(const std::vector<PageElement>& elements) {
    const std::size_t n = elements.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };

    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const auto& ba = elements[a].box;
            const auto& bb = elements[b].box;
            const double overlap = std::min(ba.y_max, bb.y_max) - std::max(ba.y_min, bb.y_min);
            if (overlap > 0 && overlap >= 0.5 * std::min(ba.height(), bb.height())) {
                parent[find(a)] = find(b);
            }
        }
    }

    std::vector<std::vector<int>> groups;
    std::vector<long> group_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = find(i);
        if (group_of[root] < 0) {
            group_of[root] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(group_of[root])].push_back(static_cast<int>(i));
    }

    auto x_of = [&](int i) { return elements[static_cast<std::size_t>(i)].box.x_min; };
    auto y_of = [&](int i) { return elements[static_cast<std::size_t>(i)].box.y_min; };
    for (auto& g : groups) {
        std::stable_sort(g.begin(), g.end(), [&](int a, int b) { return x_of(a) < x_of(b); });
    }
    auto top = [&](const std::vector<int>& g) {
        double y = y_of(g.front());
        for (int i : g) y = std::min(y, y_of(i));
        return y;
    };
    std::stable_sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
        const double ya = top(a);
        const double yb = top(b);
        if (ya != yb) return ya < yb;
        return x_of(a.front()) < x_of(b.front());
    });
    return groups;
}

// ---- JSON ------------------------------------------------------------------

std::string serialize_ir(const PageIr& ir) {
    ordered_json doc;
    doc["image_id"] = ir.image_id;
    doc["canvas_w"] = ir.canvas_w;
    doc["canvas_h"] = ir.canvas_h;
    doc["elements"] = ordered_json::array();
    for (const auto& e : ir.elements) {
        ordered_json j;
        j["cls"] = std::string(detect::to_string(e.cls));
        j["box"] = ordered_json::array(
            {jf::number(e.box.x_min), jf::number(e.box.y_min), jf::number(e.box.x_max), jf::number(e.box.y_max)});
        j["text"] = e.text ? ordered_json(*e.text) : ordered_json(nullptr);
        j["link_target"] = e.link_target ? ordered_json(*e.link_target) : ordered_json(nullptr);
        doc["elements"].push_back(std::move(j));
    }
    doc["rows"] = ordered_json::array();
    for (const auto& row : ir.rows) {
        doc["rows"].push_back(row);
    }
    return doc.dump(2) + "\n";
}

PageIr deserialize_ir(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("malformed JSON: ") + e.what());
    }
    PageIr ir;
    ir.image_id = jf::as_string(jf::member(doc, "", "image_id"), "/image_id");
    ir.canvas_w = jf::as_int(jf::member(doc, "", "canvas_w"), "/canvas_w");
    ir.canvas_h = jf::as_int(jf::member(doc, "", "canvas_h"), "/canvas_h");

    const auto& elements = jf::array_at(jf::member(doc, "", "elements"), "/elements");
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const auto ptr = jf::child("/elements", i);
        const auto& e = elements[i];
        PageElement el;
        const auto label = jf::as_string(jf::member(e, ptr, "cls"), ptr + "/cls");
        const auto cls = detect::parse_ui_class(label);
        if (!cls) jf::fail(ptr + "/cls", "unknown class: " + label);
        if (*cls == UiClass::Linker) jf::fail(ptr + "/cls", "Linker is not a page element");
        el.cls = *cls;

        const auto bptr = ptr + "/box";
        const auto& b = jf::array_at(jf::member(e, ptr, "box"), bptr);
        if (b.size() != 4) jf::fail(bptr, "expected [x_min, y_min, x_max, y_max]");
        el.box = {jf::as_number(b[0], bptr + "/0"), jf::as_number(b[1], bptr + "/1"), jf::as_number(b[2], bptr + "/2"),
                  jf::as_number(b[3], bptr + "/3")};
        if (!el.box.valid()) jf::fail(bptr, "inverted box");

        if (auto it = e.find("text"); it != e.end() && !it->is_null()) {
            el.text = jf::as_string(*it, ptr + "/text");
        }
        if (auto it = e.find("link_target"); it != e.end() && !it->is_null()) {
            el.link_target = jf::as_string(*it, ptr + "/link_target");
            if (el.link_target->empty()) jf::fail(ptr + "/link_target", "empty link target");
        }
        ir.elements.push_back(std::move(el));
    }

    const auto& rows = jf::array_at(jf::member(doc, "", "rows"), "/rows");
    std::vector<bool> seen(ir.elements.size(), false);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto rptr = jf::child("/rows", r);
        const auto& row = jf::array_at(rows[r], rptr);
        auto& out_row = ir.rows.emplace_back();
        for (std::size_t k = 0; k < row.size(); ++k) {
            const auto kptr = jf::child(rptr, k);
            const int idx = jf::as_int(row[k], kptr);
            if (idx < 0 || static_cast<std::size_t>(idx) >= ir.elements.size()) jf::fail(kptr, "index out of range");
            if (seen[static_cast<std::size_t>(idx)]) jf::fail(kptr, "element listed twice");
            seen[static_cast<std::size_t>(idx)] = true;
            out_row.push_back(idx);
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        jf::fail("/rows", "rows do not cover every element");
    }
    return ir;
}

}  // namespace skelgen::ir
