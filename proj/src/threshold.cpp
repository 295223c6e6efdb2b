// SPDX-License-Identifier: Apache-2.0
#include "occsim/threshold.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace occsim {

double otsu_threshold(std::span<const double> values, std::span<const double> weights) {
    if (values.empty()) {
        throw std::invalid_argument("otsu_threshold needs at least one sample");
    }
    if (!weights.empty() && weights.size() != values.size()) {
        throw std::invalid_argument("otsu_threshold weights must match values");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    auto weight = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

    double total_w = 0.0;
    double total_s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weight(i) < 0.0) throw std::invalid_argument("otsu_threshold weights must be non-negative");
        total_w += weight(i);
        total_s += weight(i) * values[i];
    }

    double best_score = -1.0;
    double best_threshold = values[order.front()];
    double w0 = 0.0;
    double s0 = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const std::size_t i = order[k];
        w0 += weight(i);
        s0 += weight(i) * values[i];
        const double lo = values[i];
        const double hi = values[order[k + 1]];
        if (!(hi > lo)) continue;
        const double w1 = total_w - w0;
        if (w0 <= 0.0 || w1 <= 0.0) continue;
        const double diff = s0 / w0 - (total_s - s0) / w1;
        const double score = w0 * w1 * diff * diff;
        if (score > best_score) {
            best_score = score;
            best_threshold = 0.5 * (lo + hi);
        }
    }
    return best_threshold;
}

}  // namespace occsim
