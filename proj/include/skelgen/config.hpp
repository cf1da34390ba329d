// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

#include "skelgen/detect.hpp"
#include "skelgen/ocr.hpp"
#include "skelgen/raster.hpp"
#include "skelgen/table_structure.hpp"

namespace skelgen {

struct PipelineConfig {
    // [ocr]
    std::string ocr_command;                    // template with {input}
    std::chrono::milliseconds ocr_timeout = ocr::kDefaultOcrTimeout;
    std::filesystem::path ocr_fixture;          // JSON fixture; wins over ocr_command

    // [preprocess]
    int adaptive_kernel_w = raster::kAdaptiveKernelWidth;
    int adaptive_kernel_h = raster::kAdaptiveKernelHeight;
    int adaptive_c = raster::kAdaptiveOffset;

    // [detect]
    double ioe_threshold = detect::kIoeThreshold;
    double overlap_threshold = detect::kOverlapThreshold;
    detect::PriorityMap priorities = detect::default_priorities();

    // [table]
    int min_cell_px = table::kMinCellPx;
    int roi_pad = table::kRoiPad;

    // [output]
    std::filesystem::path out_dir = ".";

    /// Throws a parse error naming the offending key.
    void validate() const;
};

/// INI-style file: "[section]" headers and "key = value" lines; '#' or ';'
/// start comments. Unknown keys are rejected. Values override `base`.
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
PipelineConfig config_from_string(const std::string& text, PipelineConfig base = {});

}  // namespace skelgen
