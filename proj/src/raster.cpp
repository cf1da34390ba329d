// SPDX-License-Identifier: Apache-2.0

#include "skelgen/raster.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "skelgen/error.hpp"

namespace skelgen::raster {

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("GrayImage: dimensions must be >= 1");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("GrayImage: dimensions must be >= 1");
    }
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw std::invalid_argument("GrayImage: data length does not match width*height");
    }
}

BinaryImage::BinaryImage(int width, int height, bool fill) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("BinaryImage: dimensions must be >= 1");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t BinaryImage::count() const {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

StructKernel::StructKernel(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) {
        throw std::invalid_argument("StructKernel: dimensions must be >= 1");
    }
}

// ---- PGM -------------------------------------------------------------------

namespace {

class PgmReader {
public:
    PgmReader(const std::vector<std::uint8_t>& bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw parse_error(origin_ + ": " + what + " at byte " + std::to_string(pos_));
    }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long read_uint(const char* field) {
        skip_space_and_comments();
        const auto start = pos_;
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L) fail(std::string("malformed header: ") + field + " too large");
            ++pos_;
        }
        if (pos_ == start) fail(std::string("malformed header: expected ") + field);
        return value;
    }

    std::size_t pos_ = 0;
    const std::vector<std::uint8_t>& bytes_;
    const std::string& origin_;
};

}  // namespace

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
    PgmReader r(bytes, origin);
    if (bytes.size() < 2 || bytes[0] != 'P') r.fail("malformed header");
    const char kind = static_cast<char>(bytes[1]);
    if (kind != '2' && kind != '5') {
        r.fail(std::string("unsupported format P") + kind);
    }
    r.pos_ = 2;
    const long w = r.read_uint("width");
    const long h = r.read_uint("height");
    const long maxval = r.read_uint("maxval");
    if (w < 1 || h < 1) r.fail("malformed header: zero dimension");
    if (maxval < 1 || maxval > 255) r.fail("unsupported format: maxval " + std::to_string(maxval));
    const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);

    std::vector<std::uint8_t> data;
    data.reserve(n);
    if (kind == '5') {
        // exactly one whitespace byte separates the header from the payload
        if (r.pos_ >= bytes.size() || !std::isspace(bytes[r.pos_])) r.fail("malformed header");
        ++r.pos_;
        if (bytes.size() - r.pos_ < n) {
            r.pos_ = bytes.size();
            r.fail("truncated payload (" + std::to_string(n) + " bytes expected)");
        }
        data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(r.pos_),
                    bytes.begin() + static_cast<std::ptrdiff_t>(r.pos_ + n));
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            r.skip_space_and_comments();
            if (r.pos_ >= bytes.size()) r.fail("truncated payload");
            const long v = r.read_uint("pixel");
            if (v > maxval) r.fail("pixel value exceeds maxval");
            data.push_back(static_cast<std::uint8_t>(v));
        }
    }
    return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

GrayImage load_gray(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error(path.string() + ": cannot open file");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_pgm(bytes, path.string());
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.data().begin(), img.data().end());
    return out;
}

void save_pgm(const std::filesystem::path& path, const GrayImage& img) {
    const auto bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error(path.string() + ": cannot open for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw io_error(path.string() + ": write failed");
    }
}

void save_pgm(const std::filesystem::path& path, const BinaryImage& img) { save_pgm(path, to_gray(img)); }

GrayImage to_gray(const BinaryImage& bin, std::uint8_t fg, std::uint8_t bg) {
    GrayImage out(bin.width(), bin.height());
    for (int y = 0; y < bin.height(); ++y) {
        for (int x = 0; x < bin.width(); ++x) {
            out.at(x, y) = bin.at(x, y) ? fg : bg;
        }
    }
    return out;
}

// ---- binarization ----------------------------------------------------------

BinaryImage global_threshold(const GrayImage& img, int threshold, bool ink_is_dark) {
    BinaryImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const int v = img.at(x, y);
            out.set(x, y, ink_is_dark ? v < threshold : v >= threshold);
        }
    }
    return out;
}

namespace {

using u128 = unsigned __int128;

// Three-way compare of p1/q1 and p2/q2 (q > 0) without overflow, by
// continued-fraction expansion.
int compare_fractions(u128 p1, u128 q1, u128 p2, u128 q2) {
    const u128 i1 = p1 / q1;
    const u128 i2 = p2 / q2;
    if (i1 != i2) return i1 < i2 ? -1 : 1;
    const u128 r1 = p1 % q1;
    const u128 r2 = p2 % q2;
    if (r1 == 0 || r2 == 0) {
        if (r1 == r2) return 0;
        return r1 == 0 ? -1 : 1;
    }
    // r1/q1 < r2/q2  <=>  q1/r1 > q2/r2
    return -compare_fractions(q1, r1, q2, r2);
}

}  // namespace

int otsu_level(const GrayImage& img, bool* constant) {
    std::array<std::uint64_t, 256> hist{};
    for (auto v : img.data()) ++hist[v];

    int levels = 0;
    int only_level = 0;
    for (int v = 0; v < 256; ++v) {
        if (hist[v] != 0) {
            ++levels;
            only_level = v;
        }
    }
    if (constant != nullptr) *constant = levels <= 1;
    if (levels <= 1) return only_level + 1;

    // N * (weighted within-class variance) = sum(x^2) - s0^2/n0 - s1^2/n1, so
    // the minimizer maximizes s0^2/n0 + s1^2/n1 = (s0^2 n1 + s1^2 n0) / (n0 n1).
    std::uint64_t total_n = 0;
    std::uint64_t total_s = 0;
    for (int v = 0; v < 256; ++v) {
        total_n += hist[v];
        total_s += hist[v] * static_cast<std::uint64_t>(v);
    }

    int best_t = 1;
    u128 best_num = 0;
    u128 best_den = 1;
    std::uint64_t n0 = 0;
    std::uint64_t s0 = 0;
    for (int t = 1; t <= 255; ++t) {
        n0 += hist[t - 1];
        s0 += hist[t - 1] * static_cast<std::uint64_t>(t - 1);
        const std::uint64_t n1 = total_n - n0;
        const std::uint64_t s1 = total_s - s0;
        u128 num;
        u128 den;
        if (n0 == 0) {
            num = u128(s1) * s1;
            den = n1;
        } else if (n1 == 0) {
            num = u128(s0) * s0;
            den = n0;
        } else {
            num = u128(s0) * s0 * n1 + u128(s1) * s1 * n0;
            den = u128(n0) * n1;
        }
        if (t == 1 || compare_fractions(num, den, best_num, best_den) > 0) {
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }
    return best_t;
}

BinaryImage binarize_auto_polarity(const GrayImage& img, int threshold, bool* ink_is_dark) {
    auto out = global_threshold(img, threshold, true);
    const auto total = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(img.height());
    bool dark = true;
    if (2 * out.count() > total) {
        out = invert(out);
        dark = false;
    }
    if (ink_is_dark != nullptr) *ink_is_dark = dark;
    return out;
}

OtsuResult otsu_threshold(const GrayImage& img) {
    OtsuResult r;
    r.threshold = otsu_level(img, &r.constant);
    r.image = binarize_auto_polarity(img, r.threshold, &r.ink_is_dark);
    return r;
}

BinaryImage mean_adaptive_threshold(const GrayImage& img, StructKernel kernel, int c, WindowBorder border) {
    const int w = img.width();
    const int h = img.height();
    const int ax = kernel.anchor_x();
    const int ay = kernel.anchor_y();

    // Integral image over the in-image pixels; replicated taps are handled by
    // counting how many window columns/rows clamp onto each edge.
    std::vector<std::int64_t> integral(static_cast<std::size_t>(w + 1) * static_cast<std::size_t>(h + 1), 0);
    auto I = [&](int x, int y) -> std::int64_t& {
        return integral[static_cast<std::size_t>(y) * static_cast<std::size_t>(w + 1) + static_cast<std::size_t>(x)];
    };
    for (int y = 0; y < h; ++y) {
        std::int64_t row = 0;
        for (int x = 0; x < w; ++x) {
            row += img.at(x, y);
            I(x + 1, y + 1) = I(x + 1, y) + row;
        }
    }
    auto rect_sum = [&](int x0, int y0, int x1, int y1) {  // inclusive
        return I(x1 + 1, y1 + 1) - I(x0, y1 + 1) - I(x1 + 1, y0) + I(x0, y0);
    };

    // For replicate borders, tap (x + i) maps to clamp(x + i). The window sum
    // then splits into the clipped interior rectangle plus edge multiplicities;
    // equivalently, weight[k] = number of taps landing on column k.
    BinaryImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const int wy0 = y - ay;
        const int wy1 = wy0 + kernel.height - 1;
        const int cy0 = std::clamp(wy0, 0, h - 1);
        const int cy1 = std::clamp(wy1, 0, h - 1);
        for (int x = 0; x < w; ++x) {
            const int wx0 = x - ax;
            const int wx1 = wx0 + kernel.width - 1;
            const int cx0 = std::clamp(wx0, 0, w - 1);
            const int cx1 = std::clamp(wx1, 0, w - 1);

            std::int64_t sum = 0;
            std::int64_t area = 0;
            if (border == WindowBorder::Clip) {
                sum = rect_sum(cx0, cy0, cx1, cy1);
                area = static_cast<std::int64_t>(cx1 - cx0 + 1) * (cy1 - cy0 + 1);
            } else {
                // extra taps beyond each edge, per axis
                const std::int64_t left = std::max(0, -wx0);
                const std::int64_t right = std::max(0, wx1 - (w - 1));
                const std::int64_t top = std::max(0, -wy0);
                const std::int64_t bottom = std::max(0, wy1 - (h - 1));
                // column weights: cx0 gets 1+left, cx1 gets 1+right; rows alike.
                // sum = sum_{rows r} wr * sum_{cols k} wk * p(k, r)
                auto row_sum = [&](int r) {
                    std::int64_t s = rect_sum(cx0, r, cx1, r);
                    s += left * img.at(cx0, r);
                    s += right * img.at(cx1, r);
                    return s;
                };
                sum = rect_sum(cx0, cy0, cx1, cy1);
                sum += left * rect_sum(cx0, cy0, cx0, cy1);
                sum += right * rect_sum(cx1, cy0, cx1, cy1);
                sum += top * row_sum(cy0);
                sum += bottom * row_sum(cy1);
                area = static_cast<std::int64_t>(kernel.width) * kernel.height;
            }
            // v < sum/area - c  <=>  v*area < sum - c*area
            const std::int64_t v = img.at(x, y);
            out.set(x, y, v * area < sum - static_cast<std::int64_t>(c) * area);
        }
    }
    return out;
}

// ---- morphology ------------------------------------------------------------

BinaryImage invert(const BinaryImage& bin) {
    BinaryImage out(bin.width(), bin.height());
    for (int y = 0; y < bin.height(); ++y) {
        for (int x = 0; x < bin.width(); ++x) {
            out.set(x, y, !bin.at(x, y));
        }
    }
    return out;
}

namespace {

// Separable min/max along one axis. For erosion the window of output p is
// [p - a, p - a + k - 1]; dilation uses the reflected window
// [p + a - k + 1, p + a] so that it is the adjoint of erosion.
BinaryImage pass(const BinaryImage& in, int k, int a, bool horizontal, bool is_erode, bool oob_value) {
    const int w = in.width();
    const int h = in.height();
    BinaryImage out(w, h);
    const int len = horizontal ? w : h;
    const int lines = horizontal ? h : w;
    std::vector<int> prefix(static_cast<std::size_t>(len) + 1);
    for (int line = 0; line < lines; ++line) {
        prefix[0] = 0;
        for (int i = 0; i < len; ++i) {
            const bool v = horizontal ? in.at(i, line) : in.at(line, i);
            prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + (v ? 1 : 0);
        }
        for (int p = 0; p < len; ++p) {
            const int lo = is_erode ? p - a : p + a - k + 1;
            const int hi = lo + k - 1;
            const int clo = std::max(lo, 0);
            const int chi = std::min(hi, len - 1);
            const bool touches_oob = lo < 0 || hi > len - 1;
            const int inside = chi >= clo ? prefix[static_cast<std::size_t>(chi) + 1] - prefix[static_cast<std::size_t>(clo)] : 0;
            const int span = chi >= clo ? chi - clo + 1 : 0;
            bool v;
            if (is_erode) {
                v = inside == span && (!touches_oob || oob_value);
            } else {
                v = inside > 0 || (touches_oob && oob_value);
            }
            if (horizontal) {
                out.set(p, line, v);
            } else {
                out.set(line, p, v);
            }
        }
    }
    return out;
}

}  // namespace

BinaryImage erode(const BinaryImage& bin, StructKernel kernel, Border border) {
    const bool oob = border == Border::Foreground;
    auto tmp = pass(bin, kernel.width, kernel.anchor_x(), true, true, oob);
    return pass(tmp, kernel.height, kernel.anchor_y(), false, true, oob);
}

BinaryImage dilate(const BinaryImage& bin, StructKernel kernel, Border border) {
    const bool oob = border == Border::Foreground;
    auto tmp = pass(bin, kernel.width, kernel.anchor_x(), true, false, oob);
    return pass(tmp, kernel.height, kernel.anchor_y(), false, false, oob);
}

GrayImage erode(const GrayImage& img, StructKernel kernel) {
    const int ax = kernel.anchor_x();
    const int ay = kernel.anchor_y();
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            int m = 255;
            for (int dy = 0; dy < kernel.height && m > 0; ++dy) {
                for (int dx = 0; dx < kernel.width; ++dx) {
                    const int sx = x - ax + dx;
                    const int sy = y - ay + dy;
                    if (sx < 0 || sy < 0 || sx >= img.width() || sy >= img.height()) {
                        m = 0;
                        break;
                    }
                    m = std::min<int>(m, img.at(sx, sy));
                }
            }
            out.at(x, y) = static_cast<std::uint8_t>(m);
        }
    }
    return out;
}

GrayImage weighted_sum(const GrayImage& a, const GrayImage& b, double alpha, double beta) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw std::invalid_argument("weighted_sum: dimension mismatch");
    }
    GrayImage out(a.width(), a.height());
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        const double v = std::floor(alpha * a.data()[i] + beta * b.data()[i] + 0.5);
        out.data()[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    return out;
}

GrayImage crop(const GrayImage& img, int x, int y, int w, int h) {
    if (w < 1 || h < 1 || x < 0 || y < 0 || x + w > img.width() || y + h > img.height()) {
        throw std::out_of_range("crop: region outside image");
    }
    GrayImage out(w, h);
    for (int yy = 0; yy < h; ++yy) {
        for (int xx = 0; xx < w; ++xx) {
            out.at(xx, yy) = img.at(x + xx, y + yy);
        }
    }
    return out;
}

}  // namespace skelgen::raster
