// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace skelgen::raster {

/// 8-bit luminance image, row-major.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }

    std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return data_[index(x, y)]; }

    const std::vector<std::uint8_t>& data() const noexcept { return data_; }
    std::vector<std::uint8_t>& data() noexcept { return data_; }

    bool operator==(const GrayImage&) const = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Two-level image; true marks foreground (ink).
class BinaryImage {
public:
    BinaryImage() = default;
    BinaryImage(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool at(int x, int y) const { return data_[index(x, y)] != 0; }
    void set(int x, int y, bool v) { data_[index(x, y)] = v ? 1 : 0; }

    std::size_t count() const;
    bool none() const { return count() == 0; }

    bool operator==(const BinaryImage&) const = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    // uint8_t rather than vector<bool> so rows stay addressable
    std::vector<std::uint8_t> data_;
};

/// Rectangular all-ones structuring element. The anchor sits at
/// floor((dim - 1) / 2) along each axis.
struct StructKernel {
    int width = 1;
    int height = 1;

    StructKernel() = default;
    StructKernel(int w, int h);

    int anchor_x() const noexcept { return (width - 1) / 2; }
    int anchor_y() const noexcept { return (height - 1) / 2; }
};

// What lies outside the image for morphology.
enum class Border { Background, Foreground };

// Window policy for the adaptive threshold mean.
enum class WindowBorder {
    Replicate,  // out-of-image taps repeat the nearest edge pixel
    Clip,       // only in-image taps are averaged
};

// ---- I/O -------------------------------------------------------------------

GrayImage load_gray(const std::filesystem::path& path);
GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes, const std::string& origin = "<memory>");

/// "P5\n<w> <h>\n255\n" followed by raw bytes.
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
void save_pgm(const std::filesystem::path& path, const GrayImage& img);
/// Foreground is written as 0 and background as 255.
void save_pgm(const std::filesystem::path& path, const BinaryImage& img);

GrayImage to_gray(const BinaryImage& bin, std::uint8_t fg = 0, std::uint8_t bg = 255);

// ---- binarization ----------------------------------------------------------

BinaryImage global_threshold(const GrayImage& img, int threshold, bool ink_is_dark);

struct OtsuResult {
    int threshold = 0;
    BinaryImage image;
    bool ink_is_dark = true;
    // Single gray level: threshold is that level + 1 and every pixel falls in
    // one class.
    bool constant = false;
};

/// Lowest threshold in 1..255 minimizing the weighted intra-class variance,
/// with polarity chosen by the foreground-fraction rule.
OtsuResult otsu_threshold(const GrayImage& img);

/// Only the threshold search of otsu_threshold. Returns level + 1 for
/// constant images.
int otsu_level(const GrayImage& img, bool* constant = nullptr);

/// Applies the polarity rule: dark ink first, flipped when more than half of
/// the image would end up foreground.
BinaryImage binarize_auto_polarity(const GrayImage& img, int threshold, bool* ink_is_dark = nullptr);

inline constexpr int kAdaptiveKernelWidth = 73;
inline constexpr int kAdaptiveKernelHeight = 17;
inline constexpr int kAdaptiveOffset = 2;

/// Foreground iff luminance < window mean - c. Mean is compared exactly.
BinaryImage mean_adaptive_threshold(const GrayImage& img,
                                    StructKernel kernel = {kAdaptiveKernelWidth, kAdaptiveKernelHeight},
                                    int c = kAdaptiveOffset,
                                    WindowBorder border = WindowBorder::Replicate);

// ---- morphology ------------------------------------------------------------

BinaryImage invert(const BinaryImage& bin);

BinaryImage erode(const BinaryImage& bin, StructKernel kernel, Border border = Border::Background);
BinaryImage dilate(const BinaryImage& bin, StructKernel kernel, Border border = Border::Background);

/// Grayscale erosion (window minimum). Out-of-image taps read as 0.
GrayImage erode(const GrayImage& img, StructKernel kernel);

inline BinaryImage open(const BinaryImage& bin, StructKernel kernel) { return dilate(erode(bin, kernel), kernel); }

/// alpha * a + beta * b, rounded half-up and clamped to 0..255.
GrayImage weighted_sum(const GrayImage& a, const GrayImage& b, double alpha, double beta);

GrayImage crop(const GrayImage& img, int x, int y, int w, int h);

}  // namespace skelgen::raster
