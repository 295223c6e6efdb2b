// SPDX-License-Identifier: Apache-2.0
#include "occsim/beam_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "occsim/csv.hpp"
#include "occsim/error.hpp"
#include "occsim/image.hpp"
#include "occsim/numeric.hpp"
#include "occsim/units.hpp"

namespace occsim {

IntensityMap::IntensityMap(int width, int height, double spacing_m, std::vector<double> values)
    : width_(width), height_(height), spacing_m_(spacing_m), values_(std::move(values)) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("intensity map must be non-empty");
    }
    if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw std::invalid_argument("intensity map values do not match its dimensions");
    }
    if (!(spacing_m > 0.0)) {
        throw std::invalid_argument("intensity map spacing must be > 0");
    }
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("intensity map values must be finite and >= 0");
        }
    }
}

double IntensityMap::total_power() const {
    double total = 0.0;
    for (double v : values_) total += v;
    return total;
}

IntensityMap IntensityMap::from_pgm(const std::filesystem::path& path, double spacing_m) {
    const PgmData data = read_pgm_data(path);
    std::vector<double> values(data.samples.begin(), data.samples.end());
    return IntensityMap(data.width, data.height, spacing_m, std::move(values));
}

namespace {

// Power per scan line: column sums for horizontal scans, row sums for vertical.
std::vector<double> line_sums(const IntensityMap& map, ScanAxis axis) {
    const bool horizontal = axis == ScanAxis::horizontal;
    std::vector<double> sums(static_cast<std::size_t>(horizontal ? map.width() : map.height()), 0.0);
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            sums[horizontal ? x : y] += map.at(x, y);
        }
    }
    return sums;
}

}  // namespace

std::vector<double> scanning_slit_profile(const IntensityMap& map, ScanAxis axis, int slit_width) {
    const std::vector<double> lines = line_sums(map, axis);
    const int extent = static_cast<int>(lines.size());
    if (slit_width < 1 || slit_width > extent) {
        throw std::invalid_argument("slit width must lie in [1, " + std::to_string(extent) + "]");
    }
    std::vector<double> profile(static_cast<std::size_t>(extent - slit_width + 1));
    for (std::size_t k = 0; k < profile.size(); ++k) {
        double s = 0.0;
        for (int j = 0; j < slit_width; ++j) s += lines[k + j];
        profile[k] = s;
    }
    return profile;
}

std::vector<double> knife_edge_profile(const IntensityMap& map, ScanAxis axis) {
    const std::vector<double> lines = line_sums(map, axis);
    std::vector<double> curve(lines.size() + 1, 0.0);
    for (std::size_t k = lines.size(); k-- > 0;) {
        curve[k] = curve[k + 1] + lines[k];
    }
    return curve;
}

namespace {

// First edge position where the decreasing curve reaches `level`.
double crossing(const std::vector<double>& curve, double level) {
    for (std::size_t k = 1; k < curve.size(); ++k) {
        if (curve[k] <= level) {
            const double a = curve[k - 1];
            const double b = curve[k];
            return a == b ? static_cast<double>(k) : (k - 1) + (a - level) / (a - b);
        }
    }
    return static_cast<double>(curve.size() - 1);
}

}  // namespace

double knife_edge_width(const std::vector<double>& curve, double low, double high) {
    if (curve.size() < 2 || !(curve.front() > 0.0)) {
        throw DomainError("knife-edge curve must hold positive power");
    }
    if (!(low > 0.0 && low < high && high < 1.0)) {
        throw DomainError("knife-edge fractions must satisfy 0 < low < high < 1");
    }
    const double total = curve.front();
    return crossing(curve, low * total) - crossing(curve, high * total);
}

void AngularProfile::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const AngularSample& s = samples[i];
        if (!(s.angle_deg >= 0.0 && s.angle_deg <= 180.0)) {
            throw std::invalid_argument("profile angle " + format_double(s.angle_deg) + " outside [0, 180]");
        }
        if (!(s.power >= 0.0) || !std::isfinite(s.power)) {
            throw std::invalid_argument("profile power must be finite and >= 0");
        }
        if (i > 0 && !(s.angle_deg > samples[i - 1].angle_deg)) {
            throw std::invalid_argument("profile angles must be strictly increasing");
        }
    }
}

AngularProfile normalize_profile(const AngularProfile& profile) {
    profile.validate();
    double peak = 0.0;
    for (const auto& s : profile.samples) peak = std::max(peak, s.power);
    if (!(peak > 0.0)) {
        throw DomainError("cannot normalize a profile with no positive power");
    }
    AngularProfile out;
    out.unit = "norm";
    out.samples.reserve(profile.samples.size());
    for (const auto& s : profile.samples) {
        out.samples.push_back({s.angle_deg, s.power == peak ? 1.0 : s.power / peak});
    }
    return out;
}

namespace {

constexpr double kMaxFitThetaDeg = 85.0;

struct FitSample {
    double cos_theta;
    double power;
};

// Least-squares amplitude of cos^m against the samples.
double best_amplitude(const std::vector<FitSample>& samples, double m) {
    CompensatedSum cross;
    CompensatedSum norm;
    for (const auto& s : samples) {
        const double c = std::pow(s.cos_theta, m);
        cross.add(s.power * c);
        norm.add(c * c);
    }
    return norm.value() > 0.0 ? cross.value() / norm.value() : 0.0;
}

double sum_squares(const std::vector<FitSample>& samples, double m) {
    const double amplitude = best_amplitude(samples, m);
    CompensatedSum acc;
    for (const auto& s : samples) {
        const double r = s.power - amplitude * std::pow(s.cos_theta, m);
        acc.add(r * r);
    }
    return acc.value();
}

}  // namespace

FitResult fit_lambertian(const AngularProfile& profile) {
    const AngularProfile normalized = normalize_profile(profile);
    std::vector<FitSample> samples;
    std::set<double> distinct_positive;
    for (const auto& s : normalized.samples) {
        const double theta_deg = std::abs(s.angle_deg - 90.0);
        if (theta_deg >= kMaxFitThetaDeg) continue;
        samples.push_back({std::cos(deg_to_rad(theta_deg)), s.power});
        if (s.power > 0.0) distinct_positive.insert(theta_deg);
    }
    if (distinct_positive.size() < 3) {
        throw DomainError("Lambertian fit needs at least 3 positive samples at distinct angles below 85 deg");
    }

    // Coarse logarithmic scan, then golden-section refinement in log m.
    constexpr int kGrid = 601;
    const double log_lo = std::log(1e-3);
    const double log_hi = std::log(1e3);
    const double step = (log_hi - log_lo) / (kGrid - 1);
    int best = 0;
    double best_value = sum_squares(samples, std::exp(log_lo));
    for (int i = 1; i < kGrid; ++i) {
        const double v = sum_squares(samples, std::exp(log_lo + i * step));
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    double a = log_lo + std::max(0, best - 1) * step;
    double b = log_lo + std::min(kGrid - 1, best + 1) * step;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = sum_squares(samples, std::exp(c));
    double fd = sum_squares(samples, std::exp(d));
    while (b - a > 1e-12) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sum_squares(samples, std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sum_squares(samples, std::exp(d));
        }
    }
    FitResult fit;
    fit.m_hat = std::exp(0.5 * (a + b));
    fit.amplitude = best_amplitude(samples, fit.m_hat);
    fit.samples_used = samples.size();
    fit.residual_rms = std::sqrt(sum_squares(samples, fit.m_hat) / static_cast<double>(samples.size()));
    return fit;
}

AngularProfile angular_power_scan(const TransmitterSpec& tx, ScreenOrientation orientation,
                                  const ScanOptions& options) {
    if (!(options.arc_radius_m > 0.0)) throw DomainError("arc radius must be > 0");
    if (!(options.lambertian_order > 0.0)) throw DomainError("Lambertian order must be > 0");
    if (options.n_angles < 3) throw DomainError("angular scan needs at least 3 angles");
    if (options.grid < 1) throw DomainError("emitter grid must be >= 1");
    if (!(options.detector_area_m2 > 0.0)) throw DomainError("detector area must be > 0");

    const int n = options.grid;
    const double m = options.lambertian_order;
    const double radius = options.arc_radius_m;
    const double emitter_power = tx.transmit_power_w() / (static_cast<double>(n) * n);
    const double prefactor = emitter_power * options.detector_area_m2 * (m + 1.0) / (2.0 * kPi);

    std::vector<double> ex(static_cast<std::size_t>(n));
    std::vector<double> ey(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = (i + 0.5) / n - 0.5;
        ex[i] = u * tx.screen_width_m();
        ey[i] = u * tx.screen_height_m();
    }

    AngularProfile profile;
    profile.unit = "uW";
    profile.samples.reserve(static_cast<std::size_t>(options.n_angles));
    for (int k = 0; k < options.n_angles; ++k) {
        const double angle_deg = 180.0 * k / (options.n_angles - 1);
        const double phi = deg_to_rad(angle_deg);
        // Arc coordinate (in-plane) and height above the screen.
        const double s = radius * std::cos(phi);
        const double z = radius * std::sin(phi);
        const double dx = orientation == ScreenOrientation::landscape ? s : 0.0;
        const double dy = orientation == ScreenOrientation::landscape ? 0.0 : s;

        CompensatedSum acc;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const double vx = dx - ex[i];
                const double vy = dy - ey[j];
                const double r2 = vx * vx + vy * vy + z * z;
                const double r = std::sqrt(r2);
                const double cos_theta = z / r;
                const double cos_psi = (vx * dx + vy * dy + z * z) / (r * radius);
                if (cos_theta <= 0.0 || cos_psi <= 0.0) continue;
                acc.add(prefactor * std::pow(cos_theta, m) * cos_psi / r2);
            }
        }
        profile.samples.push_back({angle_deg, acc.value() * 1e6});
    }
    return profile;
}

void write_profile_csv(const AngularProfile& profile, std::ostream& out) {
    out << "# unit=" << profile.unit << "\n";
    out << "angle_deg,power\n";
    for (const auto& s : profile.samples) {
        out << format_double(s.angle_deg) << ',' << format_double(s.power) << "\n";
    }
}

AngularProfile read_profile_csv(std::istream& in, const std::string& source) {
    const NumericCsv csv = read_numeric_csv(in, source);
    if (csv.header != std::vector<std::string>{"angle_deg", "power"}) {
        throw SchemaError(source + ": expected header 'angle_deg,power'");
    }
    AngularProfile profile;
    if (const auto it = csv.meta.find("unit"); it != csv.meta.end()) {
        if (it->second != "uW" && it->second != "norm") {
            throw SchemaError(source + ": unit must be 'uW' or 'norm', found '" + it->second + "'");
        }
        profile.unit = it->second;
    }
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        const AngularSample sample{csv.rows[i][0], csv.rows[i][1]};
        if (!(sample.angle_deg >= 0.0 && sample.angle_deg <= 180.0)) {
            throw ParseError(source, csv.row_lines[i], "angle outside [0, 180]");
        }
        if (!(sample.power >= 0.0)) {
            throw ParseError(source, csv.row_lines[i], "negative power");
        }
        if (!profile.samples.empty() && !(sample.angle_deg > profile.samples.back().angle_deg)) {
            throw ParseError(source, csv.row_lines[i], "angles must be strictly increasing");
        }
        profile.samples.push_back(sample);
    }
    return profile;
}

}  // namespace occsim
