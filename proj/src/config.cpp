// SPDX-License-Identifier: Apache-2.0

#include "skelgen/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>
#include <sstream>

#include "skelgen/error.hpp"

namespace skelgen {

namespace pt = boost::property_tree;

void PipelineConfig::validate() const {
    auto ratio = [](double v, const char* key) {
        if (!(v >= 0.0 && v <= 1.0)) throw parse_error(std::string("config: ") + key + " must be in [0,1]");
    };
    ratio(ioe_threshold, "detect.ioe_threshold");
    ratio(overlap_threshold, "detect.overlap_threshold");
    if (adaptive_kernel_w < 1 || adaptive_kernel_h < 1) {
        throw parse_error("config: preprocess.kernel_w/kernel_h must be >= 1");
    }
    if (min_cell_px < 1) throw parse_error("config: table.min_cell_px must be >= 1");
    if (roi_pad < 0) throw parse_error("config: table.roi_pad must be >= 0");
    if (ocr_timeout.count() < 1) throw parse_error("config: ocr.timeout_ms must be >= 1");
}

namespace {

template <typename T>
T get_value(const std::string& full_key, const std::string& raw) {
    try {
        std::istringstream in(raw);
        T v;
        in >> v;
        if (!in || !(in >> std::ws).eof()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw parse_error("config: bad value for " + full_key + ": '" + raw + "'");
    }
}

}  // namespace

PipelineConfig config_from_string(const std::string& text, PipelineConfig cfg) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw parse_error("config: line " + std::to_string(e.line()) + ": " + e.message());
    }

    static const std::set<std::string> known = {
        "ocr.command",         "ocr.timeout_ms", "ocr.fixture",  "preprocess.kernel_w", "preprocess.kernel_h",
        "preprocess.c",        "detect.ioe_threshold",          "detect.overlap_threshold",
        "detect.priorities",   "table.min_cell_px", "table.roi_pad", "output.dir",
    };

    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw parse_error("config: key '" + section + "' outside of a section");
        }
        for (const auto& [key, node] : body) {
            const auto full = section + "." + key;
            if (!known.count(full)) throw parse_error("config: unknown key " + full);
            const auto raw = node.get_value<std::string>();
            if (full == "ocr.command") cfg.ocr_command = raw;
            else if (full == "ocr.timeout_ms") cfg.ocr_timeout = std::chrono::milliseconds(get_value<long>(full, raw));
            else if (full == "ocr.fixture") cfg.ocr_fixture = raw;
            else if (full == "preprocess.kernel_w") cfg.adaptive_kernel_w = get_value<int>(full, raw);
            else if (full == "preprocess.kernel_h") cfg.adaptive_kernel_h = get_value<int>(full, raw);
            else if (full == "preprocess.c") cfg.adaptive_c = get_value<int>(full, raw);
            else if (full == "detect.ioe_threshold") cfg.ioe_threshold = get_value<double>(full, raw);
            else if (full == "detect.overlap_threshold") cfg.overlap_threshold = get_value<double>(full, raw);
            else if (full == "detect.priorities") cfg.priorities = detect::parse_priorities(raw);
            else if (full == "table.min_cell_px") cfg.min_cell_px = get_value<int>(full, raw);
            else if (full == "table.roi_pad") cfg.roi_pad = get_value<int>(full, raw);
            else if (full == "output.dir") cfg.out_dir = raw;
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw io_error(path.string() + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return config_from_string(ss.str(), std::move(base));
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

}  // namespace skelgen
