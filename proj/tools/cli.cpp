// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "skelgen/codegen.hpp"
#include "skelgen/config.hpp"
#include "skelgen/detect.hpp"
#include "skelgen/error.hpp"
#include "skelgen/eval.hpp"
#include "skelgen/ocr.hpp"
#include "skelgen/raster.hpp"
#include "skelgen/table_structure.hpp"
#include "skelgen/ui_ir.hpp"

namespace skelgen::cli {

namespace fs = std::filesystem;

namespace {

std::shared_ptr<spdlog::logger> logger() {
    static auto log = [] {
        auto l = std::make_shared<spdlog::logger>("skelgen", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        l->set_pattern("[%l] %v");
        return l;
    }();
    return log;
}

class StageTimer {
public:
    explicit StageTimer(std::string stage) : stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
        logger()->info("{}: {:.1f} ms", stage_, ms);
    }

private:
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    bool debug_masks = false;
    std::string ocr_fixture;
    std::string ocr_command;
    std::optional<long> ocr_timeout_ms;
};

PipelineConfig resolve_config(const CommonOptions& opts) {
    PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (!opts.ocr_fixture.empty()) cfg.ocr_fixture = opts.ocr_fixture;
    if (!opts.ocr_command.empty()) cfg.ocr_command = opts.ocr_command;
    if (opts.ocr_timeout_ms) cfg.ocr_timeout = std::chrono::milliseconds(*opts.ocr_timeout_ms);
    cfg.validate();
    return cfg;
}

class UnconfiguredRecognizer : public ocr::Recognizer {
public:
    ocr::OcrResult recognize(const raster::GrayImage&) override {
        throw ocr_error("ocr backend failure: no OCR backend configured (use --ocr-fixture or ocr.command)");
    }
};

std::unique_ptr<ocr::Recognizer> make_recognizer(const PipelineConfig& cfg) {
    if (!cfg.ocr_fixture.empty()) {
        return std::make_unique<ocr::FixtureRecognizer>(ocr::FixtureRecognizer::from_file(cfg.ocr_fixture));
    }
    if (!cfg.ocr_command.empty()) {
        return std::make_unique<ocr::ExternalRecognizer>(cfg.ocr_command, cfg.ocr_timeout);
    }
    return std::make_unique<UnconfiguredRecognizer>();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw io_error(path.string() + ": write failed");
    logger()->info("wrote {}", path.string());
}

fs::path ensure_out_dir(const PipelineConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw io_error(cfg.out_dir.string() + ": cannot create output directory: " + ec.message());
    return cfg.out_dir;
}

// ---- preprocess ------------------------------------------------------------

int cmd_preprocess(const CommonOptions& common, const std::string& input, const std::string& mode) {
    const auto cfg = resolve_config(common);
    const auto img = [&] {
        StageTimer t("load");
        return raster::load_gray(input);
    }();

    raster::BinaryImage bin;
    std::string chosen = mode;
    {
        StageTimer t("binarize");
        const auto otsu = raster::otsu_threshold(img);
        if (mode == "auto") chosen = otsu.ink_is_dark ? "adaptive" : "otsu";
        if (chosen == "adaptive") {
            bin = raster::mean_adaptive_threshold(img, {cfg.adaptive_kernel_w, cfg.adaptive_kernel_h}, cfg.adaptive_c);
        } else {
            bin = otsu.image;
        }
        logger()->info("preprocess: mode={} (otsu threshold {}, {} background)", chosen, otsu.threshold,
                       otsu.ink_is_dark ? "light" : "dark");
    }
    const auto out = ensure_out_dir(cfg) / (fs::path(input).stem().string() + ".bin.pgm");
    raster::save_pgm(out, bin);
    logger()->info("wrote {}", out.string());
    return kOk;
}

// ---- frontend --------------------------------------------------------------

int cmd_frontend(const CommonOptions& common, const std::string& detections_path, const std::string& image_path,
                 const std::string& stem_override) {
    const auto cfg = resolve_config(common);
    auto dets = [&] {
        StageTimer t("ingest");
        return detect::load_detections(detections_path);
    }();

    raster::GrayImage page;
    if (!image_path.empty()) {
        page = raster::load_gray(image_path);
    } else {
        page = raster::GrayImage(std::max(1, dets.image_w), std::max(1, dets.image_h), 255);
    }

    std::vector<detect::TextDetection> retained;
    std::vector<detect::UiDetection> uis;
    {
        StageTimer t("filter");
        retained = detect::retain_text_boxes(dets.texts, dets.uis, cfg.ioe_threshold);
        uis = detect::resolve_ui_overlaps(dets.uis, cfg.priorities, cfg.overlap_threshold);
        logger()->info("retained {}/{} text boxes, kept {}/{} UI boxes", retained.size(), dets.texts.size(), uis.size(),
                       dets.uis.size());
    }
    dets.uis = uis;

    auto recognizer = make_recognizer(cfg);
    ir::BuildResult built;
    {
        StageTimer t("build_ir");
        built = ir::build_ir(dets, retained, page, *recognizer);
    }
    for (const auto& w : built.warnings) logger()->warn("{}", w);

    std::string stem = stem_override;
    if (stem.empty()) stem = fs::path(image_path.empty() ? detections_path : image_path).stem().string();
    const auto dir = ensure_out_dir(cfg);
    write_text(dir / (stem + ".ir.json"), ir::serialize_ir(built.ir));
    write_text(dir / (stem + ".html"), codegen::html_generate(built.ir));
    return kOk;
}

// ---- table pipelines -------------------------------------------------------

std::vector<std::string> read_table_cells(const PipelineConfig& cfg, const std::string& image_path, bool debug_masks) {
    const auto gray = raster::load_gray(image_path);
    const auto stem = fs::path(image_path).stem().string();

    table::TableResult table;
    {
        StageTimer t("table structure");
        table = table::extract_table(gray, {cfg.min_cell_px});
    }
    if (debug_masks) {
        const auto dir = ensure_out_dir(cfg);
        raster::save_pgm(dir / (stem + ".hlines.pgm"), table.masks.hlines);
        raster::save_pgm(dir / (stem + ".vlines.pgm"), table.masks.vlines);
        raster::save_pgm(dir / (stem + ".grid.pgm"), table.masks.grid);
    }
    if (table.grid.cells.empty()) {
        throw Error(ErrorKind::StructureNotFound, image_path + ": no table found");
    }
    logger()->info("{} cells in {} rows (mean height {:.1f})", table.grid.cells.size(), table.grid.rows.size(),
                   table.grid.mean_height);

    auto recognizer = make_recognizer(cfg);
    recognizer->begin_page(stem);
    std::vector<std::string> texts;
    StageTimer t("ocr");
    for (std::size_t i = 0; i < table.grid.cells.size(); ++i) {
        const auto& cell = table.grid.cells[i];
        raster::GrayImage roi;
        try {
            roi = table::extract_cell_roi(gray, cell, cfg.roi_pad);
        } catch (const std::invalid_argument&) {
            logger()->warn("cell {} too small after padding; skipped", i);
            continue;
        }
        auto text = ocr::trim_output(recognizer->recognize(roi).text);
        if (text.empty()) {
            logger()->warn("cell {} read as empty; skipped", i);
            continue;
        }
        texts.push_back(std::move(text));
    }
    return texts;
}

int cmd_classgen(const CommonOptions& common, const std::string& image_path) {
    const auto cfg = resolve_config(common);
    const auto texts = read_table_cells(cfg, image_path, common.debug_masks);
    const auto model = codegen::class_generation(texts);
    const auto name = codegen::sanitize_identifier(model.class_name);
    write_text(ensure_out_dir(cfg) / (name + ".py"), codegen::class_file_maker(model));
    return kOk;
}

int cmd_dbgen(const CommonOptions& common, const std::string& image_path, const std::string& name) {
    const auto cfg = resolve_config(common);
    auto texts = read_table_cells(cfg, image_path, common.debug_masks);
    std::string table_name = name;
    if (table_name.empty()) {
        if (texts.empty()) throw parse_error(image_path + ": no table name cell");
        table_name = texts.front();
        texts.erase(texts.begin());
    }
    const auto model = codegen::database_generation(texts, table_name);
    write_text(ensure_out_dir(cfg) / (codegen::sanitize_identifier(model.table_name) + ".sql"),
               codegen::create_sql_query(model));
    return kOk;
}

// ---- eval ------------------------------------------------------------------

std::vector<detect::DetectionSet> load_detection_sets(const fs::path& path) {
    std::vector<detect::DetectionSet> sets;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(path)) {
            const auto ext = entry.path().extension();
            if (entry.is_regular_file() && (ext == ".json" || ext == ".xml")) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) sets.push_back(detect::load_detections(f));
    } else {
        sets.push_back(detect::load_detections(path));
    }
    return sets;
}

int cmd_eval(const CommonOptions& common, const std::string& detections_path, const std::string& gt_dir) {
    const auto cfg = resolve_config(common);
    if (!fs::is_directory(gt_dir)) throw io_error(gt_dir + ": not a directory");

    std::vector<fs::path> gt_files;
    for (const auto& entry : fs::directory_iterator(gt_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml") gt_files.push_back(entry.path());
    }
    std::sort(gt_files.begin(), gt_files.end());

    std::vector<eval::ImageEval> images;
    std::map<std::string, std::size_t> by_id;
    for (const auto& f : gt_files) {
        const auto gt = detect::parse_voc(f);
        eval::ImageEval img;
        img.image_id = gt.image_id;
        for (const auto& u : gt.uis) img.ground_truth.push_back({u.cls, u.box});
        by_id[gt.image_id] = images.size();
        images.push_back(std::move(img));
    }
    for (auto& set : load_detection_sets(detections_path)) {
        auto it = by_id.find(set.image_id);
        if (it == by_id.end()) {
            logger()->warn("detections for '{}' have no ground truth; counted as false positives", set.image_id);
            by_id[set.image_id] = images.size();
            images.push_back({set.image_id, {}, {}});
            it = by_id.find(set.image_id);
        }
        auto& dets = images[it->second].detections;
        dets.insert(dets.end(), set.uis.begin(), set.uis.end());
    }

    eval::Report report;
    {
        StageTimer t("evaluate");
        report = eval::evaluate(images);
    }
    const auto json = eval::report_to_json(report);
    write_text(ensure_out_dir(cfg) / "eval.json", json);
    std::cout << json;
    return kOk;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return kIoError;
        case ErrorKind::Parse: return kParseError;
        case ErrorKind::StructureNotFound: return kNoStructure;
        case ErrorKind::OcrBackend: return kOcrFailure;
    }
    return kUnexpected;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Compile sketched UI wireframes, class diagrams and database tables into skeleton code"};
    app.require_subcommand(1);

    CommonOptions common;
    auto add_common = [&](CLI::App* sub, bool ocr) {
        sub->add_option("--config", common.config_path, "INI-style configuration file");
        sub->add_option("--out-dir", common.out_dir, "Directory for generated artifacts");
        sub->add_flag("--debug-masks", common.debug_masks, "Write intermediate table masks as PGM");
        if (ocr) {
            sub->add_option("--ocr-fixture", common.ocr_fixture, "JSON fixture of scripted OCR results");
            sub->add_option("--ocr-command", common.ocr_command, "External OCR command; {input} is the region file");
            sub->add_option("--ocr-timeout-ms", common.ocr_timeout_ms, "External OCR timeout");
        }
    };

    std::string input;
    std::string mode = "auto";
    auto* pre = app.add_subcommand("preprocess", "Binarize an image into <stem>.bin.pgm");
    pre->add_option("image", input, "Input PGM")->required();
    pre->add_option("--mode", mode, "auto|otsu|adaptive")->check(CLI::IsMember({"auto", "otsu", "adaptive"}));
    add_common(pre, false);

    std::string detections;
    std::string image;
    std::string stem;
    auto* front = app.add_subcommand("frontend", "Wireframe detections to <stem>.html and <stem>.ir.json");
    front->add_option("--detections", detections, "Detections (.json interchange or Pascal-VOC .xml)")->required();
    front->add_option("--image", image, "Wireframe image (PGM) for OCR crops");
    front->add_option("--stem", stem, "Output file stem");
    add_common(front, true);

    auto* cls = app.add_subcommand("classgen", "Class-diagram table image to a class skeleton");
    cls->add_option("image", input, "Table image (PGM)")->required();
    add_common(cls, true);

    std::string table_name;
    auto* db = app.add_subcommand("dbgen", "Database table image to CREATE TABLE DDL");
    db->add_option("image", input, "Table image (PGM)")->required();
    db->add_option("--name", table_name, "Table name; defaults to the first cell");
    add_common(db, true);

    std::string gt_dir;
    auto* ev = app.add_subcommand("eval", "Detection metrics against Pascal-VOC ground truth");
    ev->add_option("--detections", detections, "Detections file or directory")->required();
    ev->add_option("--ground-truth", gt_dir, "Directory of VOC annotations")->required();
    add_common(ev, false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kParseError;
    }

    try {
        if (*pre) return cmd_preprocess(common, input, mode);
        if (*front) return cmd_frontend(common, detections, image, stem);
        if (*cls) return cmd_classgen(common, input);
        if (*db) return cmd_dbgen(common, input, table_name);
        if (*ev) return cmd_eval(common, detections, gt_dir);
    } catch (const Error& e) {
        logger()->error("{}", e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        logger()->error("{}", e.what());
        return kUnexpected;
    }
    return kUnexpected;
}

}  // namespace skelgen::cli
