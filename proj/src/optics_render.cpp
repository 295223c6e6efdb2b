// SPDX-License-Identifier: Apache-2.0
#include "occsim/optics_render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "occsim/error.hpp"
#include "occsim/units.hpp"

namespace occsim {

namespace {

constexpr double kDefaultFrameProjectionPx = 200.0;
constexpr double kDefaultApertureM2 = 1e-4;
constexpr double kDefaultFovDeg = 45.0;

}  // namespace

CameraSpec::CameraSpec()
    : focal_length_px(kDefaultFrameProjectionPx * kReferenceDistanceM / TransmitterSpec().screen_height_m()),
      fov_semi_angle_rad(deg_to_rad(kDefaultFovDeg)) {}

CameraSpec::CameraSpec(double focal_length_px, int sensor_cols, int sensor_rows, double fov_semi_angle_rad,
                       double frame_rate_hz)
    : focal_length_px(focal_length_px),
      sensor_cols(sensor_cols),
      sensor_rows(sensor_rows),
      fov_semi_angle_rad(fov_semi_angle_rad),
      frame_rate_hz(frame_rate_hz) {
    validate();
}

void CameraSpec::validate() const {
    if (!(std::isfinite(focal_length_px) && focal_length_px > 0.0)) {
        throw DomainError("camera focal length must be > 0");
    }
    if (sensor_cols <= 0 || sensor_rows <= 0) {
        throw DomainError("camera sensor dimensions must be > 0");
    }
    if (!(fov_semi_angle_rad > 0.0 && fov_semi_angle_rad <= kPi / 2)) {
        throw DomainError("camera FOV semi-angle must lie in (0, pi/2]");
    }
    if (!(frame_rate_hz > 0.0)) {
        throw DomainError("camera frame rate must be > 0");
    }
}

SceneConfig::SceneConfig()
    : channel(TransmitterSpec().lambertian_order(), kDefaultApertureM2, deg_to_rad(kDefaultFovDeg)),
      display_extent_m(TransmitterSpec().screen_height_m()) {}

void SceneConfig::validate() const {
    noise.validate();
    camera.validate();
    if (!(blur_sigma_px >= 0.0) || !std::isfinite(blur_sigma_px)) {
        throw DomainError("blur sigma must be >= 0");
    }
    if (!(display_extent_m > 0.0) || !std::isfinite(display_extent_m)) {
        throw DomainError("display extent must be > 0");
    }
    if (!(min_feature_px > 0.0)) {
        throw DomainError("minimum feature size must be > 0");
    }
}

double projected_size(double screen_extent_m, double distance_m, const CameraSpec& camera) {
    if (!(distance_m > 0.0)) {
        throw DomainError("projection distance must be > 0");
    }
    if (!(screen_extent_m >= 0.0)) {
        throw DomainError("screen extent must be >= 0");
    }
    return screen_extent_m * camera.focal_length_px / distance_m;
}

double relative_gain(const SceneConfig& scene) {
    const double reference = channel_gain(LinkGeometry(kReferenceDistanceM), scene.channel);
    return channel_gain(scene.geometry, scene.channel) / reference;
}

namespace {

GrayImage warp_onto_sensor(const GrayImage& projected, const SceneConfig& scene) {
    const int cols = scene.camera.sensor_cols;
    const int rows = scene.camera.sensor_rows;
    GrayImage sensor(cols, rows, 1.0);
    const double cos_tilt = std::cos(scene.geometry.tilt());
    if (std::abs(cos_tilt) < 1e-9) return sensor;
    const double c = std::cos(scene.geometry.rotation());
    const double s = std::sin(scene.geometry.rotation());
    const double cx = 0.5 * cols;
    const double cy = 0.5 * rows;
    const double half_w = 0.5 * projected.width();
    const double half_h = 0.5 * projected.height();
    for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < cols; ++x) {
            const double u = x + 0.5 - cx;
            const double v = y + 0.5 - cy;
            // Undo the in-plane rotation, then the tilt foreshortening.
            const double fx = (c * u + s * v) / cos_tilt + half_w - 0.5;
            const double fy = (-s * u + c * v) + half_h - 0.5;
            if (fx < -0.5 || fy < -0.5 || fx > projected.width() - 0.5 || fy > projected.height() - 0.5) continue;
            const double sx = std::clamp(fx, 0.0, projected.width() - 1.0);
            const double sy = std::clamp(fy, 0.0, projected.height() - 1.0);
            const int x0 = static_cast<int>(sx);
            const int y0 = static_cast<int>(sy);
            const int x1 = std::min(x0 + 1, projected.width() - 1);
            const int y1 = std::min(y0 + 1, projected.height() - 1);
            const double tx = sx - x0;
            const double ty = sy - y0;
            const double top = projected.at(x0, y0) + tx * (projected.at(x1, y0) - projected.at(x0, y0));
            const double bottom = projected.at(x0, y1) + tx * (projected.at(x1, y1) - projected.at(x0, y1));
            sensor.at(x, y) = top + ty * (bottom - top);
        }
    }
    return sensor;
}

}  // namespace

CaptureResult capture(const GrayImage& frame_image, const SceneConfig& scene) {
    scene.validate();
    if (frame_image.empty()) {
        throw std::invalid_argument("cannot capture an empty frame image");
    }
    CaptureResult result;
    const int longest = std::max(frame_image.width(), frame_image.height());
    result.scale = projected_size(scene.display_extent_m, scene.geometry.distance_m(), scene.camera) / longest;
    result.gain = relative_gain(scene);

    const int proj_w = static_cast<int>(std::lround(frame_image.width() * result.scale));
    const int proj_h = static_cast<int>(std::lround(frame_image.height() * result.scale));
    if (result.scale * scene.min_feature_px < 1.0 || proj_w < 1 || proj_h < 1) {
        result.link_broken = true;
        result.reason = "projected frame features smaller than one sensor pixel";
        return result;
    }
    if (result.gain <= 0.0) {
        result.link_broken = true;
        result.reason = "receiver outside the transmitter's field of view";
        return result;
    }

    const GrayImage projected = resample_area(frame_image, proj_w, proj_h);
    const int cols = scene.camera.sensor_cols;
    const int rows = scene.camera.sensor_rows;
    result.placement = {(cols - proj_w) / 2, (rows - proj_h) / 2, proj_w, proj_h};

    GrayImage sensor;
    if (scene.geometry.tilt() == 0.0 && scene.geometry.rotation() == 0.0) {
        sensor = GrayImage(cols, rows, 1.0);
        paste(sensor, projected, result.placement.x, result.placement.y);
    } else {
        sensor = warp_onto_sensor(projected, scene);
    }
    if (scene.blur_sigma_px > 0.0) {
        sensor = gaussian_blur(sensor, scene.blur_sigma_px);
    }

    const std::vector<double> noise = sample_gaussian_noise(sensor.pixels().size(), scene.noise);
    auto pixels = sensor.pixels();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = std::clamp(result.gain * pixels[i] + noise[i], 0.0, 1.0);
    }
    result.image = std::move(sensor);
    return result;
}

}  // namespace occsim
