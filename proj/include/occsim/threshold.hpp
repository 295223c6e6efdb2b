// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

namespace occsim {

/// Weighted Otsu threshold over real-valued samples.
///
/// Samples are sorted and every split between consecutive distinct values is
/// scored by the between-class variance w0 * w1 * (mu0 - mu1)^2. The returned
/// threshold is the midpoint of the two values bracketing the best split, so
/// two clusters {a} and {b} always yield (a + b) / 2. When every sample has
/// the same value that value is returned. `weights` may be empty (all ones);
/// otherwise it must match `values` in length and be non-negative.
double otsu_threshold(std::span<const double> values, std::span<const double> weights = {});

}  // namespace occsim
