// SPDX-License-Identifier: Apache-2.0
#include "occsim/channel_model.hpp"

#include <cmath>
#include <string>

#include "occsim/error.hpp"
#include "occsim/random.hpp"
#include "occsim/units.hpp"

namespace occsim {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw DomainError(message);
    }
}

bool finite(double x) { return std::isfinite(x); }

// 20:9 aspect at the default diagonal.
const double kAspectNorm = std::hypot(20.0, 9.0);

}  // namespace

TransmitterSpec::TransmitterSpec()
    : TransmitterSpec(60.0, 1e-3, kDefaultDiagonalM * 20.0 / kAspectNorm,
                      kDefaultDiagonalM * 9.0 / kAspectNorm, 60.0) {}

TransmitterSpec::TransmitterSpec(double half_power_semi_angle_deg, double transmit_power_w,
                                 double screen_width_m, double screen_height_m, double frame_rate_hz)
    : half_angle_deg_(half_power_semi_angle_deg),
      power_w_(transmit_power_w),
      width_m_(screen_width_m),
      height_m_(screen_height_m),
      frame_rate_hz_(frame_rate_hz) {
    require(half_angle_deg_ > 0.0 && half_angle_deg_ < 90.0,
            "half-power semi-angle must lie strictly inside (0, 90) degrees");
    require(finite(power_w_) && power_w_ >= 0.0, "transmit power must be >= 0");
    require(finite(width_m_) && width_m_ > 0.0, "screen width must be > 0");
    require(finite(height_m_) && height_m_ > 0.0, "screen height must be > 0");
    require(finite(frame_rate_hz_) && frame_rate_hz_ > 0.0, "frame rate must be > 0");
}

double TransmitterSpec::lambertian_order() const { return occsim::lambertian_order(half_angle_deg_); }

LinkGeometry::LinkGeometry(double distance_m, double radiance_angle_rad, double incidence_angle_rad,
                           double tilt_rad, double rotation_rad)
    : distance_m_(distance_m),
      theta_(radiance_angle_rad),
      psi_(incidence_angle_rad),
      tilt_(tilt_rad),
      rotation_(rotation_rad) {
    require(finite(distance_m_) && distance_m_ > 0.0, "link distance must be > 0");
    require(theta_ >= 0.0 && theta_ <= kPi / 2, "radiance angle must lie in [0, pi/2]");
    require(psi_ >= 0.0 && psi_ <= kPi / 2, "incidence angle must lie in [0, pi/2]");
    require(finite(tilt_) && finite(rotation_), "tilt and rotation must be finite");
}

ChannelParams::ChannelParams(double lambertian_order, double receiver_area_m2, double fov_semi_angle_rad,
                             double filter_gain, double concentrator_gain)
    : m_(lambertian_order),
      area_m2_(receiver_area_m2),
      psi_c_(fov_semi_angle_rad),
      filter_gain_(filter_gain),
      concentrator_gain_(concentrator_gain) {
    require(finite(m_) && m_ > 0.0, "Lambertian order must be > 0");
    require(finite(area_m2_) && area_m2_ > 0.0, "receiver area must be > 0");
    require(psi_c_ > 0.0 && psi_c_ <= kPi / 2, "FOV semi-angle must lie in (0, pi/2]");
    require(finite(filter_gain_) && filter_gain_ >= 0.0, "filter gain must be >= 0");
    require(finite(concentrator_gain_) && concentrator_gain_ >= 0.0, "concentrator gain must be >= 0");
}

void NoiseParams::validate() const {
    require(finite(mean), "noise mean must be finite");
    require(finite(sigma) && sigma >= 0.0, "noise sigma must be >= 0");
}

double lambertian_order(double half_power_semi_angle_deg) {
    require(half_power_semi_angle_deg > 0.0 && half_power_semi_angle_deg < 90.0,
            "half-power semi-angle must lie strictly inside (0, 90) degrees");
    const double c = std::cos(deg_to_rad(half_power_semi_angle_deg));
    const double log_c = std::log(c);
    require(c > 0.0 && log_c < 0.0, "half-power semi-angle too close to 0 or 90 degrees");
    return -std::numbers::ln2 / log_c;
}

double half_power_semi_angle_deg(double lambertian_order) {
    require(finite(lambertian_order) && lambertian_order > 0.0, "Lambertian order must be > 0");
    return rad_to_deg(std::acos(std::exp2(-1.0 / lambertian_order)));
}

double radiant_intensity(double theta_rad, double m) {
    require(finite(m) && m > 0.0, "Lambertian order must be > 0");
    require(theta_rad >= 0.0 && theta_rad <= kPi / 2, "radiance angle must lie in [0, pi/2]");
    // cos(pi/2) is ~6e-17 in floating point; the emitter plane itself radiates nothing.
    const double c = theta_rad == kPi / 2 ? 0.0 : std::cos(theta_rad);
    return (m + 1.0) / (2.0 * kPi) * std::pow(c, m);
}

double channel_gain(const LinkGeometry& geometry, const ChannelParams& params) {
    const double psi = geometry.incidence_angle();
    if (psi > params.fov_semi_angle()) {
        return 0.0;
    }
    const double d = geometry.distance_m();
    const double m = params.lambertian_order();
    const double cos_theta = geometry.radiance_angle() == kPi / 2 ? 0.0 : std::cos(geometry.radiance_angle());
    const double cos_psi = psi == kPi / 2 ? 0.0 : std::cos(psi);
    return params.receiver_area_m2() * (m + 1.0) / (2.0 * kPi * d * d) * std::pow(cos_theta, m) *
           params.filter_gain() * params.concentrator_gain() * cos_psi;
}

double received_power(double channel_gain, double transmit_power_w) {
    require(channel_gain >= 0.0, "channel gain must be >= 0");
    require(transmit_power_w >= 0.0, "transmit power must be >= 0");
    return channel_gain * transmit_power_w;
}

double gaussian_pdf(double x, double mean, double sigma) {
    require(finite(sigma) && sigma > 0.0, "sigma must be > 0");
    const double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

std::vector<double> sample_gaussian_noise(std::size_t count, const NoiseParams& params) {
    params.validate();
    std::vector<double> out(count, params.mean);
    if (params.sigma == 0.0) {
        return out;
    }
    RandomSource rng(params.seed);
    for (double& v : out) {
        v = params.mean + params.sigma * rng.normal();
    }
    return out;
}

}  // namespace occsim
