// SPDX-License-Identifier: Apache-2.0
//
// OOK cell-grid frame codec. A frame carries one bit per cell (black = 1,
// white = 0) inside a solid black locator ring, centered on a white canvas.
//
//   transmit:  encode_frame -> rasterize_frame
//   receive:   extract_roi  -> rescale_roi -> per-cell means -> Otsu -> bits
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "occsim/bits.hpp"
#include "occsim/image.hpp"

namespace occsim {

/// Geometry of a rendered frame. The defaults tile 182 payload bits as a
/// 14 x 13 grid of 12 px cells; with the one-cell ring the grid spans
/// 192 x 180 px and sits centered on a 200 x 200 canvas.
struct FrameLayout {
    int data_cols = 14;
    int data_rows = 13;
    int cell_px = 12;
    int border_cells = 1;
    int quiet_zone_px = 4;
    int canvas_width = 200;
    int canvas_height = 200;

    std::size_t capacity_bits() const noexcept {
        return static_cast<std::size_t>(data_cols) * static_cast<std::size_t>(data_rows);
    }
    int grid_cols() const noexcept { return data_cols + 2 * border_cells; }
    int grid_rows() const noexcept { return data_rows + 2 * border_cells; }
    int grid_width_px() const noexcept { return grid_cols() * cell_px; }
    int grid_height_px() const noexcept { return grid_rows() * cell_px; }

    /// Placement of the ring's outer edge on the canvas.
    PixelBox grid_box() const noexcept {
        return {(canvas_width - grid_width_px()) / 2, (canvas_height - grid_height_px()) / 2, grid_width_px(),
                grid_height_px()};
    }

    /// Throws std::invalid_argument unless the grid plus quiet zone fits the canvas.
    void validate() const;
};

struct BitFrame {
    FrameLayout layout;
    Bits bits;                     ///< exactly layout.capacity_bits(), row-major
    std::size_t padding_bits = 0;  ///< trailing zeros appended by encode_frame
};

/// Region of interest located by the receiver.
struct Roi {
    PixelBox box;  ///< in source-image pixels
    GrayImage image;
};

struct DecodeReport {
    bool roi_found = false;
    Bits bits;
    std::vector<double> per_cell_margin;  ///< |cell mean - threshold|, one per data cell
    double threshold = 0.0;
    PixelBox roi_box;
    std::optional<double> success_rate_vs_reference;
};

/// Zero-pads `payload` to capacity. Throws CapacityError when it does not fit.
BitFrame encode_frame(std::span<const std::uint8_t> payload, const FrameLayout& layout = {});

/// Bit 1 -> 0.0, bit 0 -> 1.0, ring 0.0, everything else 1.0.
GrayImage rasterize_frame(const BitFrame& frame);

/// Bounding box of the locator ring's outer edge, or nullopt when the image
/// holds no detectable dark structure.
///
/// The image is smoothed with a 5x5 box, thresholded at the Otsu level
/// refined to the midpoint of the two class medians, and the largest
/// 4-connected dark component is taken. Rows and columns on the box edge
/// holding fewer component pixels than half the current box extent are
/// trimmed, which strips isolated noise pixels touching the ring.
std::optional<Roi> extract_roi(const GrayImage& image);

/// Bilinear resampling of the ROI to the layout's nominal grid size.
GrayImage rescale_roi(const GrayImage& roi, const FrameLayout& layout = {});

/// Full receiver pipeline. A cell's intensity is the mean over the central
/// half of the cell (both axes) in the rescaled ROI. The bit threshold is the
/// weighted Otsu level over data cells, ring cells and, when the image
/// extends past the ROI, a white reference taken from the band just outside
/// the ring weighted like the whole ring. Cells darker than the threshold
/// decode as 1.
///
/// When `reference` is given, success_rate_vs_reference compares it with the
/// first reference.size() decoded bits.
DecodeReport decode_frame(const GrayImage& image, const FrameLayout& layout = {},
                          std::optional<std::span<const std::uint8_t>> reference = std::nullopt);

/// Fraction of equal positions. Throws std::invalid_argument on length mismatch.
double success_rate(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received);

}  // namespace occsim
