// SPDX-License-Identifier: Apache-2.0
//
// Grayscale raster in normalized intensity plus the handful of operations the
// transmitter, channel and receiver need: resampling, blurring, compositing
// and binary PGM I/O.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace occsim {

/// Half-open pixel rectangle [x, x + width) x [y, y + height).
struct PixelBox {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    bool empty() const noexcept { return width <= 0 || height <= 0; }
    friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

/// Row-major grayscale image; 0 is black, 1 is white.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0);
    GrayImage(int width, int height, std::vector<double> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }

    double at(int x, int y) const noexcept { return pixels_[index(x, y)]; }
    double& at(int x, int y) noexcept { return pixels_[index(x, y)]; }

    std::span<const double> pixels() const noexcept { return pixels_; }
    std::span<double> pixels() noexcept { return pixels_; }

    /// Sub-image; the box is clipped to the image bounds.
    GrayImage crop(const PixelBox& box) const;

    void clamp_unit() noexcept;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> pixels_;
};

/// Exact-overlap box filter. Each output pixel is the area-weighted mean of
/// the source pixels it covers; suited to downscaling without aliasing.
GrayImage resample_area(const GrayImage& src, int out_width, int out_height);

/// Bilinear interpolation with pixel-center alignment and edge clamping.
GrayImage resample_bilinear(const GrayImage& src, int out_width, int out_height);

/// Mean over the (2r+1)^2 window, truncated at the image border.
GrayImage box_blur(const GrayImage& src, int radius);

/// Separable Gaussian, kernel radius ceil(3 sigma), edge-clamped.
GrayImage gaussian_blur(const GrayImage& src, double sigma_px);

/// Copy `src` into `dst` with its top-left corner at (x, y), clipping as needed.
void paste(GrayImage& dst, const GrayImage& src, int x, int y);

/// Raw PGM contents (P5 or P2, maxval up to 65535).
struct PgmData {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<std::uint16_t> samples;
};

PgmData read_pgm_data(std::istream& in, const std::string& source = "<pgm>");
PgmData read_pgm_data(const std::filesystem::path& path);

/// Reads any PGM and normalizes samples by maxval.
GrayImage read_pgm(std::istream& in, const std::string& source = "<pgm>");
GrayImage read_pgm(const std::filesystem::path& path);

/// Writes binary P5, maxval 255, sample = round(clamp(i, 0, 1) * 255).
void write_pgm(const GrayImage& image, std::ostream& out);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

}  // namespace occsim
