// SPDX-License-Identifier: Apache-2.0
#include "occsim/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "occsim/error.hpp"

namespace occsim {

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
    if (width < 0 || height < 0) {
        throw std::invalid_argument("image dimensions must be non-negative");
    }
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 0 || height < 0 ||
        pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw std::invalid_argument("pixel buffer does not match image dimensions");
    }
}

GrayImage GrayImage::crop(const PixelBox& box) const {
    const int x0 = std::clamp(box.x, 0, width_);
    const int y0 = std::clamp(box.y, 0, height_);
    const int x1 = std::clamp(box.x + box.width, x0, width_);
    const int y1 = std::clamp(box.y + box.height, y0, height_);
    GrayImage out(x1 - x0, y1 - y0);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            out.at(x - x0, y - y0) = at(x, y);
        }
    }
    return out;
}

void GrayImage::clamp_unit() noexcept {
    for (double& p : pixels_) {
        p = std::clamp(p, 0.0, 1.0);
    }
}

namespace {

struct Tap {
    int index;
    double weight;
};

// For each output sample, the source samples it overlaps and their area weights.
std::vector<std::vector<Tap>> area_taps(int in_size, int out_size) {
    std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(out_size));
    const double scale = static_cast<double>(in_size) / out_size;
    for (int o = 0; o < out_size; ++o) {
        const double lo = o * scale;
        const double hi = (o + 1) * scale;
        const int first = static_cast<int>(std::floor(lo));
        const int last = std::min(in_size - 1, static_cast<int>(std::ceil(hi)) - 1);
        for (int i = first; i <= last; ++i) {
            const double overlap = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
            if (overlap > 0.0) {
                taps[o].push_back({i, overlap / scale});
            }
        }
    }
    return taps;
}

struct Lerp {
    int i0;
    int i1;
    double t;
};

std::vector<Lerp> bilinear_taps(int in_size, int out_size) {
    std::vector<Lerp> taps(static_cast<std::size_t>(out_size));
    const double scale = static_cast<double>(in_size) / out_size;
    for (int o = 0; o < out_size; ++o) {
        const double s = std::clamp((o + 0.5) * scale - 0.5, 0.0, static_cast<double>(in_size - 1));
        const int i0 = static_cast<int>(std::floor(s));
        const int i1 = std::min(i0 + 1, in_size - 1);
        taps[o] = {i0, i1, s - i0};
    }
    return taps;
}

void require_resample_args(const GrayImage& src, int out_width, int out_height) {
    if (src.empty()) {
        throw std::invalid_argument("cannot resample an empty image");
    }
    if (out_width <= 0 || out_height <= 0) {
        throw std::invalid_argument("resample target must have positive size");
    }
}

}  // namespace

GrayImage resample_area(const GrayImage& src, int out_width, int out_height) {
    require_resample_args(src, out_width, out_height);
    const auto xt = area_taps(src.width(), out_width);
    const auto yt = area_taps(src.height(), out_height);

    GrayImage horizontal(out_width, src.height());
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < out_width; ++x) {
            double acc = 0.0;
            for (const Tap& t : xt[x]) acc += t.weight * src.at(t.index, y);
            horizontal.at(x, y) = acc;
        }
    }
    GrayImage out(out_width, out_height);
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            double acc = 0.0;
            for (const Tap& t : yt[y]) acc += t.weight * horizontal.at(x, t.index);
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage resample_bilinear(const GrayImage& src, int out_width, int out_height) {
    require_resample_args(src, out_width, out_height);
    const auto xt = bilinear_taps(src.width(), out_width);
    const auto yt = bilinear_taps(src.height(), out_height);
    GrayImage out(out_width, out_height);
    for (int y = 0; y < out_height; ++y) {
        const Lerp& ly = yt[y];
        for (int x = 0; x < out_width; ++x) {
            const Lerp& lx = xt[x];
            const double top = src.at(lx.i0, ly.i0) + lx.t * (src.at(lx.i1, ly.i0) - src.at(lx.i0, ly.i0));
            const double bottom = src.at(lx.i0, ly.i1) + lx.t * (src.at(lx.i1, ly.i1) - src.at(lx.i0, ly.i1));
            out.at(x, y) = top + ly.t * (bottom - top);
        }
    }
    return out;
}

GrayImage box_blur(const GrayImage& src, int radius) {
    if (radius <= 0 || src.empty()) {
        return src;
    }
    const int w = src.width();
    const int h = src.height();
    // Summed-area table with a zero row/column prefix.
    std::vector<double> table(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    auto sat = [&](int x, int y) -> double& { return table[static_cast<std::size_t>(y) * (w + 1) + x]; };
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += src.at(x, y);
            sat(x + 1, y + 1) = sat(x + 1, y) + row;
        }
    }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - radius);
        const int y1 = std::min(h, y + radius + 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - radius);
            const int x1 = std::min(w, x + radius + 1);
            const double sum = sat(x1, y1) - sat(x0, y1) - sat(x1, y0) + sat(x0, y0);
            out.at(x, y) = sum / static_cast<double>((x1 - x0) * (y1 - y0));
        }
    }
    return out;
}

GrayImage gaussian_blur(const GrayImage& src, double sigma_px) {
    if (!(sigma_px > 0.0) || src.empty()) {
        return src;
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma_px));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double norm = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double v = std::exp(-0.5 * (k * k) / (sigma_px * sigma_px));
        kernel[k + radius] = v;
        norm += v;
    }
    for (double& v : kernel) v /= norm;

    const int w = src.width();
    const int h = src.height();
    GrayImage tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[k + radius] * src.at(std::clamp(x + k, 0, w - 1), y);
            }
            tmp.at(x, y) = acc;
        }
    }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[k + radius] * tmp.at(x, std::clamp(y + k, 0, h - 1));
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

void paste(GrayImage& dst, const GrayImage& src, int x, int y) {
    const int x0 = std::max(0, x);
    const int y0 = std::max(0, y);
    const int x1 = std::min(dst.width(), x + src.width());
    const int y1 = std::min(dst.height(), y + src.height());
    for (int yy = y0; yy < y1; ++yy) {
        for (int xx = x0; xx < x1; ++xx) {
            dst.at(xx, yy) = src.at(xx - x, yy - y);
        }
    }
}

namespace {

// Skips whitespace and '#' comments between header tokens.
std::string next_token(std::istream& in, const std::string& source) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (token.empty()) {
        throw ParseError(source, 0, "truncated PGM header");
    }
    if (c == '#') {
        in.unget();
    }
    return token;
}

int header_int(std::istream& in, const std::string& source, const char* what) {
    const std::string token = next_token(in, source);
    try {
        std::size_t used = 0;
        const int value = std::stoi(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw ParseError(source, 0, std::string("invalid PGM ") + what + " '" + token + "'");
    }
}

}  // namespace

PgmData read_pgm_data(std::istream& in, const std::string& source) {
    const std::string magic = next_token(in, source);
    if (magic != "P5" && magic != "P2") {
        throw ParseError(source, 0, "not a PGM file (magic '" + magic + "')");
    }
    PgmData data;
    data.width = header_int(in, source, "width");
    data.height = header_int(in, source, "height");
    data.maxval = header_int(in, source, "maxval");
    if (data.width <= 0 || data.height <= 0) {
        throw ParseError(source, 0, "PGM dimensions must be positive");
    }
    if (data.maxval <= 0 || data.maxval > 65535) {
        throw ParseError(source, 0, "PGM maxval must be in [1, 65535]");
    }
    const std::size_t count = static_cast<std::size_t>(data.width) * static_cast<std::size_t>(data.height);
    data.samples.resize(count);

    if (magic == "P2") {
        for (auto& s : data.samples) {
            const int v = header_int(in, source, "sample");
            if (v < 0 || v > data.maxval) throw ParseError(source, 0, "PGM sample exceeds maxval");
            s = static_cast<std::uint16_t>(v);
        }
        return data;
    }

    // Exactly one whitespace byte separates the header from the raster;
    // next_token already consumed it.
    const std::size_t bytes_per_sample = data.maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(count * bytes_per_sample);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw ParseError(source, 0, "truncated PGM raster");
    }
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned v = bytes_per_sample == 2 ? (raw[2 * i] << 8u) | raw[2 * i + 1] : raw[i];
        if (v > static_cast<unsigned>(data.maxval)) throw ParseError(source, 0, "PGM sample exceeds maxval");
        data.samples[i] = static_cast<std::uint16_t>(v);
    }
    return data;
}

PgmData read_pgm_data(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return read_pgm_data(in, path.string());
}

namespace {

GrayImage to_gray(const PgmData& data) {
    std::vector<double> pixels(data.samples.size());
    const double maxval = data.maxval;
    std::transform(data.samples.begin(), data.samples.end(), pixels.begin(),
                   [maxval](std::uint16_t s) { return s / maxval; });
    return GrayImage(data.width, data.height, std::move(pixels));
}

}  // namespace

GrayImage read_pgm(std::istream& in, const std::string& source) { return to_gray(read_pgm_data(in, source)); }

GrayImage read_pgm(const std::filesystem::path& path) { return to_gray(read_pgm_data(path)); }

void write_pgm(const GrayImage& image, std::ostream& out) {
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    std::vector<unsigned char> raw(image.pixels().size());
    std::transform(image.pixels().begin(), image.pixels().end(), raw.begin(), [](double v) {
        return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    });
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_pgm(image, out);
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

}  // namespace occsim
