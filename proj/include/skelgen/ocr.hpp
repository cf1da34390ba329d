// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skelgen/raster.hpp"

namespace skelgen::ocr {

struct OcrResult {
    std::string text;                 // may be empty
    std::optional<double> confidence; // nullopt when the backend does not report one
};

/// Text recognition boundary. Implementations may keep per-page state (see
/// begin_page), so a recognizer must not be shared between concurrent pages.
class Recognizer {
public:
    virtual ~Recognizer() = default;

    /// Called before the regions of one image are recognized. Resets the
    /// per-image region counter.
    virtual void begin_page(const std::string& image_id) { (void)image_id; }

    virtual OcrResult recognize(const raster::GrayImage& region) = 0;
};

/// Replays scripted strings. In list mode every call returns the next entry;
/// in keyed mode the n-th region of image I (0-based) is looked up as "I:n".
class FixtureRecognizer : public Recognizer {
public:
    explicit FixtureRecognizer(std::vector<std::string> script);
    explicit FixtureRecognizer(std::map<std::string, std::string> keyed);

    /// JSON array of strings, or object keyed "image_id:index".
    static FixtureRecognizer from_json_text(const std::string& text);
    static FixtureRecognizer from_file(const std::filesystem::path& path);

    void begin_page(const std::string& image_id) override;
    OcrResult recognize(const raster::GrayImage& region) override;

    std::size_t consumed() const noexcept { return cursor_; }

private:
    std::vector<std::string> script_;
    std::map<std::string, std::string> keyed_;
    bool keyed_mode_ = false;
    std::size_t cursor_ = 0;
    std::string image_id_;
    std::size_t region_index_ = 0;
};

inline constexpr std::chrono::milliseconds kDefaultOcrTimeout{10000};

/// Runs an external recognizer. The region is written to a temporary PGM
/// whose path replaces every "{input}" in the command template; the command
/// runs under /bin/sh and its trimmed standard output is the recognized text.
class ExternalRecognizer : public Recognizer {
public:
    explicit ExternalRecognizer(std::string command_template,
                                std::chrono::milliseconds timeout = kDefaultOcrTimeout);

    OcrResult recognize(const raster::GrayImage& region) override;

    /// Directory for the temporary region files (default: system temp dir).
    void set_temp_dir(std::filesystem::path dir) { temp_dir_ = std::move(dir); }

private:
    std::string command_template_;
    std::chrono::milliseconds timeout_;
    std::filesystem::path temp_dir_;
};

/// Leading/trailing whitespace removed; interior whitespace untouched.
std::string trim_output(const std::string& s);

struct ProcessResult {
    int exit_code = -1;  // -1 when killed or not started
    bool timed_out = false;
    std::string out;
    std::string err;
};

/// Runs `command` through /bin/sh -c, capturing both streams.
ProcessResult run_shell(const std::string& command, std::chrono::milliseconds timeout);

}  // namespace skelgen::ocr
