// SPDX-License-Identifier: Apache-2.0
//
// Beam profiling of the screen emitter: scanning-slit and knife-edge
// profiles of 2D intensity maps, angular power scans along a 0-180 deg arc,
// profile normalization and Lambertian-order fitting.
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "occsim/channel_model.hpp"

namespace occsim {

/// Non-negative intensity samples on a regular grid.
class IntensityMap {
public:
    IntensityMap(int width, int height, double spacing_m, std::vector<double> values);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double spacing_m() const noexcept { return spacing_m_; }
    double at(int x, int y) const noexcept {
        return values_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
    }
    const std::vector<double>& values() const noexcept { return values_; }

    double total_power() const;

    /// Raw PGM samples (not normalized) as intensities.
    static IntensityMap from_pgm(const std::filesystem::path& path, double spacing_m);

private:
    int width_;
    int height_;
    double spacing_m_;
    std::vector<double> values_;
};

/// Scan direction. Horizontal scans move along x (columns), integrating each
/// column over all rows; vertical scans move along y.
enum class ScanAxis { horizontal, vertical };

/// Total power inside a slit `slit_width` samples wide at each position;
/// length = extent - slit_width + 1.
std::vector<double> scanning_slit_profile(const IntensityMap& map, ScanAxis axis, int slit_width);

/// Power left unobstructed when the knife covers everything before index k:
/// out[k] = sum of lines >= k, for k = 0..extent (out[extent] == 0).
///
/// out[k] - out[k + 1] equals the unit-slit profile exactly whenever the map
/// holds integer counts below 2^53 (PGM data), since every partial sum is
/// then exactly representable.
std::vector<double> knife_edge_profile(const IntensityMap& map, ScanAxis axis);

/// Edge travel between the `high` and `low` transmitted-power fractions of a
/// knife-edge curve, in samples, with linear interpolation between edge
/// positions. For a Gaussian beam with the default 90%/10% this is
/// 2.5631 * sigma.
double knife_edge_width(const std::vector<double>& curve, double low = 0.1, double high = 0.9);

struct AngularSample {
    double angle_deg;
    double power;
};

/// Power vs. detector angle on a 0-180 deg arc, 90 deg being broadside.
struct AngularProfile {
    std::vector<AngularSample> samples;
    std::string unit = "uW";  ///< "uW" or "norm"

    /// Throws std::invalid_argument unless angles strictly increase within
    /// [0, 180] and powers are non-negative.
    void validate() const;
};

/// Divides all powers by the peak. Throws DomainError for an all-zero profile.
AngularProfile normalize_profile(const AngularProfile& profile);

struct FitResult {
    double m_hat = 0.0;
    double amplitude = 0.0;  ///< fitted peak of the normalized profile
    double residual_rms = 0.0;
    std::size_t samples_used = 0;
};

/// Least-squares Lambertian order of a profile.
///
/// Powers are peak-normalized, angles mapped to theta = |angle - 90|, and
/// samples at theta >= 85 deg dropped. The order minimizing
/// sum (p_i - a cos^m theta_i)^2, with a at its least-squares optimum for
/// each m, is located on a logarithmic grid over [1e-3, 1e3] and refined by
/// golden-section search to 1e-12 relative. Fitting a keeps a noisy peak
/// sample from biasing m; for exact cosine data a = 1.
/// Requires at least 3 positive samples at distinct theta.
FitResult fit_lambertian(const AngularProfile& profile);

enum class ScreenOrientation { portrait, landscape };

struct ScanOptions {
    double arc_radius_m = 0.2;
    double lambertian_order = 1.0;
    int n_angles = 181;
    int grid = 64;                  ///< emitter elements per screen side
    double detector_area_m2 = 1e-4;
};

/// Arc scan of an extended screen modelled as grid x grid Lambertian point
/// emitters sharing the transmit power equally.
///
/// The screen lies in z = 0 facing +z, long side along x. The detector moves
/// on a semicircle of the given radius centred on the screen, always facing
/// the centre; landscape puts the long side in the arc plane, portrait the
/// short side. Each emitter adds A (m + 1) / (2 pi r^2) cos^m(theta) cos(psi)
/// of its power, summed with Neumaier compensation.
AngularProfile angular_power_scan(const TransmitterSpec& tx, ScreenOrientation orientation,
                                  const ScanOptions& options = {});

/// CSV with header `angle_deg,power` and a `# unit=<uW|norm>` comment line.
void write_profile_csv(const AngularProfile& profile, std::ostream& out);
AngularProfile read_profile_csv(std::istream& in, const std::string& source = "<csv>");

}  // namespace occsim
