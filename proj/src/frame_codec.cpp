// SPDX-License-Identifier: Apache-2.0
#include "occsim/frame_codec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "occsim/error.hpp"
#include "occsim/threshold.hpp"

namespace occsim {

void FrameLayout::validate() const {
    if (data_cols <= 0 || data_rows <= 0 || cell_px <= 0 || border_cells < 0 || quiet_zone_px < 0) {
        throw std::invalid_argument("frame layout fields must be positive");
    }
    const PixelBox box = grid_box();
    if (box.x < quiet_zone_px || box.y < quiet_zone_px) {
        throw std::invalid_argument("frame grid and quiet zone do not fit the " + std::to_string(canvas_width) +
                                    "x" + std::to_string(canvas_height) + " canvas");
    }
}

BitFrame encode_frame(std::span<const std::uint8_t> payload, const FrameLayout& layout) {
    layout.validate();
    require_binary(payload);
    const std::size_t capacity = layout.capacity_bits();
    if (payload.size() > capacity) {
        throw CapacityError("payload of " + std::to_string(payload.size()) + " bits exceeds the " +
                                std::to_string(capacity) + "-bit frame capacity",
                            payload.size(), capacity);
    }
    BitFrame frame;
    frame.layout = layout;
    frame.bits.assign(payload.begin(), payload.end());
    frame.padding_bits = capacity - payload.size();
    frame.bits.resize(capacity, 0);
    return frame;
}

GrayImage rasterize_frame(const BitFrame& frame) {
    const FrameLayout& layout = frame.layout;
    layout.validate();
    if (frame.bits.size() != layout.capacity_bits()) {
        throw std::invalid_argument("frame holds " + std::to_string(frame.bits.size()) + " bits, layout expects " +
                                    std::to_string(layout.capacity_bits()));
    }
    GrayImage image(layout.canvas_width, layout.canvas_height, 1.0);
    const PixelBox grid = layout.grid_box();
    for (int gy = 0; gy < layout.grid_rows(); ++gy) {
        for (int gx = 0; gx < layout.grid_cols(); ++gx) {
            const int dx = gx - layout.border_cells;
            const int dy = gy - layout.border_cells;
            const bool in_data = dx >= 0 && dy >= 0 && dx < layout.data_cols && dy < layout.data_rows;
            const bool black =
                !in_data || frame.bits[static_cast<std::size_t>(dy) * layout.data_cols + static_cast<std::size_t>(dx)];
            if (!black) continue;
            for (int y = 0; y < layout.cell_px; ++y) {
                for (int x = 0; x < layout.cell_px; ++x) {
                    image.at(grid.x + gx * layout.cell_px + x, grid.y + gy * layout.cell_px + y) = 0.0;
                }
            }
        }
    }
    return image;
}

namespace {

constexpr int kMinSmoothingRadius = 2;
constexpr int kMaxSmoothingRadius = 8;
// Required distance from the threshold to each class level, in units of the
// smoothed noise.
constexpr double kLevelSeparation = 4.0;
constexpr int kHistogramBins = 256;

// Histogram Otsu over [lo, hi], refined to the midpoint of the two class
// medians. Medians ignore the intermediate values a blur leaves along edges,
// so a clean two-level image always splits exactly halfway.
struct Levels {
    double dark;
    double bright;
    double threshold;
};

Levels image_levels(const GrayImage& image, double lo, double hi) {
    std::array<double, kHistogramBins> hist{};
    const double width = (hi - lo) / kHistogramBins;
    for (double v : image.pixels()) {
        hist[std::clamp(static_cast<int>((v - lo) / width), 0, kHistogramBins - 1)] += 1.0;
    }

    double total = 0.0;
    double total_moment = 0.0;
    for (int k = 0; k < kHistogramBins; ++k) {
        total += hist[k];
        total_moment += hist[k] * k;
    }
    double best = -1.0;
    int split = 1;  // first bright bin
    double w0 = 0.0;
    double m0 = 0.0;
    for (int k = 0; k + 1 < kHistogramBins; ++k) {
        w0 += hist[k];
        m0 += hist[k] * k;
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double diff = m0 / w0 - (total_moment - m0) / w1;
        const double score = w0 * w1 * diff * diff;
        if (score > best) {
            best = score;
            split = k + 1;
        }
    }

    auto median_bin = [&](int first, int last) {
        double count = 0.0;
        for (int k = first; k < last; ++k) count += hist[k];
        double seen = 0.0;
        for (int k = first; k < last; ++k) {
            seen += hist[k];
            if (seen >= 0.5 * count) return k;
        }
        return last - 1;
    };
    Levels levels{lo, hi, lo + split * width};
    for (int iter = 0; iter < 16; ++iter) {
        const int dark = median_bin(0, split);
        const int bright = median_bin(split, kHistogramBins);
        levels.dark = lo + (dark + 0.5) * width;
        levels.bright = lo + (bright + 0.5) * width;
        levels.threshold = 0.5 * (levels.dark + levels.bright);
        const int next =
            std::clamp(static_cast<int>(std::ceil((levels.threshold - lo) / width)), 1, kHistogramBins - 1);
        if (next == split) break;
        split = next;
    }
    return levels;
}

// Pixel noise from the median absolute horizontal difference; edges are too
// sparse to move the median.
double noise_sigma(const GrayImage& image) {
    if (image.width() < 2) return 0.0;
    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(image.width() - 1) * image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x + 1 < image.width(); ++x) diffs.push_back(std::abs(image.at(x + 1, y) - image.at(x, y)));
    }
    auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
    std::nth_element(diffs.begin(), mid, diffs.end());
    return 1.482602218505602 * *mid / std::sqrt(2.0);
}

struct Component {
    std::size_t size = 0;
    PixelBox box;
    std::vector<int> row_counts;
    std::vector<int> col_counts;
};

// Largest 4-connected component of `mask`; ties resolve to the first found in
// raster order.
Component largest_component(const std::vector<std::uint8_t>& mask, int width, int height) {
    std::vector<std::int32_t> label(mask.size(), -1);
    std::vector<std::size_t> stack;
    std::int32_t next_label = 0;
    std::int32_t best_label = -1;
    std::size_t best_size = 0;

    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || label[start] >= 0) continue;
        std::size_t size = 0;
        stack.push_back(start);
        label[start] = next_label;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++size;
            const int x = static_cast<int>(p % width);
            const int y = static_cast<int>(p / width);
            auto visit = [&](int nx, int ny) {
                if (nx < 0 || ny < 0 || nx >= width || ny >= height) return;
                const std::size_t q = static_cast<std::size_t>(ny) * width + nx;
                if (mask[q] && label[q] < 0) {
                    label[q] = next_label;
                    stack.push_back(q);
                }
            };
            visit(x - 1, y);
            visit(x + 1, y);
            visit(x, y - 1);
            visit(x, y + 1);
        }
        if (size > best_size) {
            best_size = size;
            best_label = next_label;
        }
        ++next_label;
    }

    Component c;
    c.size = best_size;
    if (best_label < 0) return c;
    c.row_counts.assign(static_cast<std::size_t>(height), 0);
    c.col_counts.assign(static_cast<std::size_t>(width), 0);
    int x0 = width, y0 = height, x1 = -1, y1 = -1;
    for (std::size_t p = 0; p < label.size(); ++p) {
        if (label[p] != best_label) continue;
        const int x = static_cast<int>(p % width);
        const int y = static_cast<int>(p / width);
        ++c.row_counts[y];
        ++c.col_counts[x];
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
    }
    c.box = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
    return c;
}

void trim_sparse_edges(const Component& c, PixelBox& box) {
    int x0 = box.x, y0 = box.y, x1 = box.x + box.width - 1, y1 = box.y + box.height - 1;
    bool changed = true;
    while (changed && x0 < x1 && y0 < y1) {
        changed = false;
        const double half_w = 0.5 * (x1 - x0 + 1);
        const double half_h = 0.5 * (y1 - y0 + 1);
        if (c.row_counts[y0] < half_w) { ++y0; changed = true; }
        if (y1 > y0 && c.row_counts[y1] < half_w) { --y1; changed = true; }
        if (c.col_counts[x0] < half_h) { ++x0; changed = true; }
        if (x1 > x0 && c.col_counts[x1] < half_h) { --x1; changed = true; }
    }
    box = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

// Mean of the raw image along line `pos` (a column when `vertical_edge`,
// else a row), taken over [from, to) of the other axis.
double line_mean(const GrayImage& image, bool vertical_edge, int pos, int from, int to) {
    double sum = 0.0;
    for (int i = from; i < to; ++i) sum += vertical_edge ? image.at(pos, i) : image.at(i, pos);
    return sum / (to - from);
}

// Moves one edge of `box` to where the raw line-mean profile near it crosses
// halfway between its darkest and brightest values. `outward` is -1 for the
// left/top edge and +1 for the right/bottom edge.
int refine_edge(const GrayImage& image, const PixelBox& box, bool vertical_edge, int outward, int reach) {
    const int along0 = vertical_edge ? box.y : box.x;
    const int along_len = vertical_edge ? box.height : box.width;
    const int margin = along_len / 10;
    const int from = along0 + margin;
    const int to = along0 + along_len - margin;
    const int limit = vertical_edge ? image.width() : image.height();
    const int edge = outward < 0 ? (vertical_edge ? box.x : box.y)
                                 : (vertical_edge ? box.x + box.width - 1 : box.y + box.height - 1);
    if (to - from < 1) return edge;

    const int outer = std::clamp(edge + outward * reach, 0, limit - 1);
    const int inner = std::clamp(edge - outward * reach, 0, limit - 1);
    std::vector<double> profile;
    for (int pos = outer;; pos -= outward) {
        profile.push_back(line_mean(image, vertical_edge, pos, from, to));
        if (pos == inner) break;
    }
    const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
    if (!(*hi - *lo > 1e-9)) return edge;
    const double mid = 0.5 * (*lo + *hi);
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile[i] < mid) return outer - outward * static_cast<int>(i);
    }
    return edge;
}

PixelBox refine_box(const GrayImage& image, const PixelBox& box, int reach) {
    const int x0 = refine_edge(image, box, true, -1, reach);
    const int x1 = refine_edge(image, box, true, +1, reach);
    const int y0 = refine_edge(image, box, false, -1, reach);
    const int y1 = refine_edge(image, box, false, +1, reach);
    if (x1 <= x0 || y1 <= y0) return box;
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

}  // namespace

std::optional<Roi> extract_roi(const GrayImage& image) {
    if (image.empty()) return std::nullopt;
    // Widen the smoothing until the threshold clears both levels by several
    // smoothed-noise sigmas, so background noise cannot bridge into the frame.
    const double sigma = noise_sigma(image);
    GrayImage smooth;
    Levels levels{};
    int radius = kMinSmoothingRadius;
    for (; radius <= kMaxSmoothingRadius; ++radius) {
        smooth = box_blur(image, radius);
        const auto [lo_it, hi_it] = std::minmax_element(smooth.pixels().begin(), smooth.pixels().end());
        if (!(*hi_it - *lo_it > 1e-6)) return std::nullopt;
        levels = image_levels(smooth, *lo_it, *hi_it);
        if (levels.bright - levels.dark >= 2.0 * kLevelSeparation * sigma / (2 * radius + 1)) break;
    }
    radius = std::min(radius, kMaxSmoothingRadius);

    const double t = levels.threshold;
    std::vector<std::uint8_t> mask(smooth.pixels().size());
    std::transform(smooth.pixels().begin(), smooth.pixels().end(), mask.begin(),
                   [t](double v) { return static_cast<std::uint8_t>(v < t); });

    const Component c = largest_component(mask, image.width(), image.height());
    if (c.size == 0) return std::nullopt;
    PixelBox box = c.box;
    trim_sparse_edges(c, box);
    if (box.width < 2 || box.height < 2) return std::nullopt;
    box = refine_box(image, box, radius + 2);
    return Roi{box, image.crop(box)};
}

GrayImage rescale_roi(const GrayImage& roi, const FrameLayout& layout) {
    if (roi.empty()) {
        throw std::invalid_argument("cannot rescale a zero-area ROI");
    }
    GrayImage out = resample_bilinear(roi, layout.grid_width_px(), layout.grid_height_px());
    out.clamp_unit();
    return out;
}

namespace {

double cell_mean(const GrayImage& grid, int gx, int gy, int cell_px) {
    const int inset = cell_px / 4;
    const int x0 = gx * cell_px + inset;
    const int y0 = gy * cell_px + inset;
    const int n = cell_px - 2 * inset;
    double sum = 0.0;
    for (int y = y0; y < y0 + n; ++y) {
        for (int x = x0; x < x0 + n; ++x) sum += grid.at(x, y);
    }
    return sum / (n * n);
}

// Mean of the band of `thickness` px surrounding `box`, clipped to the image.
std::optional<double> surround_mean(const GrayImage& image, const PixelBox& box, int thickness) {
    const int x0 = std::max(0, box.x - thickness);
    const int y0 = std::max(0, box.y - thickness);
    const int x1 = std::min(image.width(), box.x + box.width + thickness);
    const int y1 = std::min(image.height(), box.y + box.height + thickness);
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const bool inside = x >= box.x && x < box.x + box.width && y >= box.y && y < box.y + box.height;
            if (inside) continue;
            sum += image.at(x, y);
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

}  // namespace

DecodeReport decode_frame(const GrayImage& image, const FrameLayout& layout,
                          std::optional<std::span<const std::uint8_t>> reference) {
    layout.validate();
    if (reference) {
        require_binary(*reference);
        if (reference->size() > layout.capacity_bits()) {
            throw CapacityError("reference longer than frame capacity", reference->size(), layout.capacity_bits());
        }
    }

    DecodeReport report;
    const std::optional<Roi> roi = extract_roi(image);
    if (!roi) return report;
    report.roi_found = true;
    report.roi_box = roi->box;

    const GrayImage grid = rescale_roi(roi->image, layout);
    std::vector<double> data_means;
    std::vector<double> samples;
    std::vector<double> weights;
    data_means.reserve(layout.capacity_bits());
    std::size_t ring_cells = 0;
    for (int gy = 0; gy < layout.grid_rows(); ++gy) {
        for (int gx = 0; gx < layout.grid_cols(); ++gx) {
            const double mean = cell_mean(grid, gx, gy, layout.cell_px);
            const int dx = gx - layout.border_cells;
            const int dy = gy - layout.border_cells;
            if (dx >= 0 && dy >= 0 && dx < layout.data_cols && dy < layout.data_rows) {
                data_means.push_back(mean);
            } else {
                ++ring_cells;
            }
            samples.push_back(mean);
            weights.push_back(1.0);
        }
    }
    // data_means is filled in row-major grid order, which is the payload order.
    const double source_cell_px = static_cast<double>(roi->box.width) / layout.grid_cols();
    const int band = std::max(1, static_cast<int>(source_cell_px / 4.0));
    if (const auto white = surround_mean(image, roi->box, band); white && ring_cells > 0) {
        samples.push_back(*white);
        weights.push_back(static_cast<double>(ring_cells));
    }

    report.threshold = otsu_threshold(samples, weights);
    report.bits.reserve(data_means.size());
    report.per_cell_margin.reserve(data_means.size());
    for (double mean : data_means) {
        report.bits.push_back(mean < report.threshold ? 1 : 0);
        report.per_cell_margin.push_back(std::abs(mean - report.threshold));
    }
    if (reference) {
        report.success_rate_vs_reference =
            success_rate(*reference, std::span<const std::uint8_t>(report.bits).first(reference->size()));
    }
    return report;
}

double success_rate(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received) {
    if (sent.size() != received.size()) {
        throw std::invalid_argument("success_rate needs equal lengths (" + std::to_string(sent.size()) + " vs " +
                                    std::to_string(received.size()) + ")");
    }
    if (sent.empty()) return 1.0;
    std::size_t same = 0;
    for (std::size_t i = 0; i < sent.size(); ++i) same += (sent[i] == received[i]) ? 1 : 0;
    return static_cast<double>(same) / static_cast<double>(sent.size());
}

}  // namespace occsim
