// SPDX-License-Identifier: Apache-2.0
//
// Free-space capture of a displayed frame by a pinhole camera: the frame
// shrinks as 1/d on the sensor, its intensity follows the LOS channel gain
// relative to the 20 cm on-axis reference, and Gaussian pixel noise is added.
#pragma once

#include <string>

#include "occsim/channel_model.hpp"
#include "occsim/image.hpp"

namespace occsim {

/// Distance at which the captured frame has unit signal amplitude.
inline constexpr double kReferenceDistanceM = 0.2;

struct CameraSpec {
    double focal_length_px;
    int sensor_cols = 420;
    int sensor_rows = 420;
    double fov_semi_angle_rad;
    double frame_rate_hz = 60.0;

    /// Focal length chosen so a frame filling the default screen's short side
    /// projects to 200 px at 20 cm; the 420 px sensor still holds the 10 cm
    /// projection.
    CameraSpec();
    CameraSpec(double focal_length_px, int sensor_cols, int sensor_rows, double fov_semi_angle_rad,
               double frame_rate_hz);

    void validate() const;
};

struct SceneConfig {
    LinkGeometry geometry{kReferenceDistanceM};
    ChannelParams channel;
    NoiseParams noise;
    CameraSpec camera;
    TransmitterSpec tx;
    double blur_sigma_px = 0.0;
    /// Physical size on the screen of the frame image's longer side.
    double display_extent_m;
    /// Smallest frame feature (in frame-image pixels) that must project to at
    /// least one sensor pixel for the link to hold; the default is one cell.
    double min_feature_px = 12.0;

    /// Default desk profile: 6.41-inch 60 fps screen, Lambertian order from
    /// the transmitter, 1 cm^2 aperture, 45 deg FOV, 20 cm on-axis, no noise.
    SceneConfig();

    void validate() const;
};

/// Pinhole projection: extent * focal_length / d.
double projected_size(double screen_extent_m, double distance_m, const CameraSpec& camera);

/// H(scene) / H(same channel at 20 cm on-axis).
double relative_gain(const SceneConfig& scene);

struct CaptureResult {
    bool link_broken = false;
    std::string reason;        ///< set when link_broken
    GrayImage image;           ///< sensor raster; empty when link_broken
    PixelBox placement;        ///< where the frame image landed (tilt = rotation = 0)
    double scale = 0.0;        ///< sensor px per frame-image px
    double gain = 0.0;         ///< relative channel gain applied
};

/// Simulated camera capture of `frame_image` (normalized, any size).
///
/// clamp( H_rel * blur( place(area_resample(frame)) on white sensor ) + noise )
///
/// Non-zero tilt/rotation apply an experimental affine warp (foreshortening
/// by cos(tilt) then in-plane rotation) instead of the axis-aligned paste.
/// A link is broken when the projected feature size drops below one pixel or
/// the receiver sits outside the FOV; that is reported, not thrown.
CaptureResult capture(const GrayImage& frame_image, const SceneConfig& scene);

}  // namespace occsim
