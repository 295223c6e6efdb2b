// SPDX-License-Identifier: Apache-2.0
//
// Line-of-sight optical channel for a screen transmitter and a camera
// receiver: Lambertian emission, DC channel gain, received power and the
// additive Gaussian pixel noise model.
//
// Angles are radians everywhere except the half-power semi-angle, which is
// conventionally quoted in degrees on datasheets.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace occsim {

/// Emitting screen. Defaults describe a 6.41-inch 20:9 OLED panel at 60 fps
/// with an ideal Lambertian (60 deg half-power) pattern.
class TransmitterSpec {
public:
    static constexpr double kDefaultDiagonalM = 6.41 * 0.0254;

    TransmitterSpec();
    TransmitterSpec(double half_power_semi_angle_deg, double transmit_power_w, double screen_width_m,
                    double screen_height_m, double frame_rate_hz);

    double half_power_semi_angle_deg() const noexcept { return half_angle_deg_; }
    double transmit_power_w() const noexcept { return power_w_; }
    double screen_width_m() const noexcept { return width_m_; }
    double screen_height_m() const noexcept { return height_m_; }
    double frame_rate_hz() const noexcept { return frame_rate_hz_; }

    /// Lambertian order implied by the half-power semi-angle.
    double lambertian_order() const;

private:
    double half_angle_deg_;
    double power_w_;
    double width_m_;
    double height_m_;
    double frame_rate_hz_;
};

/// Receiver placement relative to the transmitter.
class LinkGeometry {
public:
    LinkGeometry(double distance_m, double radiance_angle_rad = 0.0, double incidence_angle_rad = 0.0,
                 double tilt_rad = 0.0, double rotation_rad = 0.0);

    double distance_m() const noexcept { return distance_m_; }
    double radiance_angle() const noexcept { return theta_; }
    double incidence_angle() const noexcept { return psi_; }
    double tilt() const noexcept { return tilt_; }
    double rotation() const noexcept { return rotation_; }

    LinkGeometry at_distance(double distance_m) const {
        return LinkGeometry(distance_m, theta_, psi_, tilt_, rotation_);
    }

private:
    double distance_m_;
    double theta_;
    double psi_;
    double tilt_;
    double rotation_;
};

class ChannelParams {
public:
    ChannelParams(double lambertian_order, double receiver_area_m2, double fov_semi_angle_rad,
                  double filter_gain = 1.0, double concentrator_gain = 1.0);

    double lambertian_order() const noexcept { return m_; }
    double receiver_area_m2() const noexcept { return area_m2_; }
    double fov_semi_angle() const noexcept { return psi_c_; }
    double filter_gain() const noexcept { return filter_gain_; }
    double concentrator_gain() const noexcept { return concentrator_gain_; }

private:
    double m_;
    double area_m2_;
    double psi_c_;
    double filter_gain_;
    double concentrator_gain_;
};

/// Additive pixel noise N(mean, sigma^2). sigma == 0 is a noiseless channel.
struct NoiseParams {
    double mean = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// m = -ln 2 / ln(cos(theta_half)). Throws DomainError unless 0 < angle < 90.
double lambertian_order(double half_power_semi_angle_deg);

/// Inverse of lambertian_order: acos(2^(-1/m)) in degrees.
double half_power_semi_angle_deg(double lambertian_order);

/// R(theta) = (m + 1) / (2 pi) * cos^m(theta), per steradian.
double radiant_intensity(double theta_rad, double m);

/// LOS DC gain
///   H = A_r (m + 1) / (2 pi d^2) * cos^m(theta) * T_s * g * cos(psi)   for psi <= psi_c
///   H = 0                                                               otherwise
double channel_gain(const LinkGeometry& geometry, const ChannelParams& params);

double received_power(double channel_gain, double transmit_power_w);

double gaussian_pdf(double x, double mean, double sigma);

/// `count` draws from N(mean, sigma^2); the sequence depends only on params.
std::vector<double> sample_gaussian_noise(std::size_t count, const NoiseParams& params);

}  // namespace occsim
