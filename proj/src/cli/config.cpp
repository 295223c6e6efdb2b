// SPDX-License-Identifier: Apache-2.0
#include "occsim/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "occsim/csv.hpp"
#include "occsim/error.hpp"
#include "occsim/units.hpp"

namespace occsim::cli {

KeyValues parse_key_values(std::istream& in, const std::string& source) {
    KeyValues values;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw ParseError(source, number, "expected 'key = value'");
        const std::string key(trim(text.substr(0, eq)));
        const std::string value(trim(text.substr(eq + 1)));
        if (key.empty()) throw ParseError(source, number, "empty key");
        if (!values.emplace(key, value).second) throw ParseError(source, number, "duplicate key '" + key + "'");
    }
    return values;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_key_values(in, path.string());
}

void write_key_values(const KeyValues& values, std::ostream& out) {
    for (const auto& [key, value] : values) out << key << " = " << value << "\n";
}

const std::vector<std::string>& scene_keys() {
    static const std::vector<std::string> keys{
        "distance_m",          "radiance_angle_deg", "incidence_angle_deg", "tilt_deg",
        "rotation_deg",        "half_power_angle_deg", "transmit_power_w",  "screen_width_m",
        "screen_height_m",     "screen_frame_rate_hz", "receiver_area_m2",  "fov_semi_angle_deg",
        "filter_gain",         "concentrator_gain",  "noise_mean",          "noise_sigma",
        "seed",                "focal_length_px",    "sensor_cols",         "sensor_rows",
        "camera_frame_rate_hz", "blur_sigma_px",     "display_extent_m",    "min_feature_px",
    };
    return keys;
}

KeyValues default_scene_values() {
    const SceneConfig s;
    const auto f = [](double v) { return format_double(v); };
    return {
        {"distance_m", f(s.geometry.distance_m())},
        {"radiance_angle_deg", "0"},
        {"incidence_angle_deg", "0"},
        {"tilt_deg", "0"},
        {"rotation_deg", "0"},
        {"half_power_angle_deg", f(s.tx.half_power_semi_angle_deg())},
        {"transmit_power_w", f(s.tx.transmit_power_w())},
        {"screen_width_m", f(s.tx.screen_width_m())},
        {"screen_height_m", f(s.tx.screen_height_m())},
        {"screen_frame_rate_hz", f(s.tx.frame_rate_hz())},
        {"receiver_area_m2", f(s.channel.receiver_area_m2())},
        {"fov_semi_angle_deg", "45"},
        {"filter_gain", f(s.channel.filter_gain())},
        {"concentrator_gain", f(s.channel.concentrator_gain())},
        {"noise_mean", f(s.noise.mean)},
        {"noise_sigma", f(s.noise.sigma)},
        {"seed", "1"},
        {"focal_length_px", f(s.camera.focal_length_px)},
        {"sensor_cols", std::to_string(s.camera.sensor_cols)},
        {"sensor_rows", std::to_string(s.camera.sensor_rows)},
        {"camera_frame_rate_hz", f(s.camera.frame_rate_hz)},
        {"blur_sigma_px", f(s.blur_sigma_px)},
        {"display_extent_m", f(s.display_extent_m)},
        {"min_feature_px", f(s.min_feature_px)},
    };
}

std::string default_scene_text() {
    const KeyValues values = default_scene_values();
    std::ostringstream out;
    out << "# Default desk scene: 6.41-inch 20:9 screen, receiver 20 cm on-axis, no noise.\n"
        << "# Angles in degrees, lengths in metres, image sizes in pixels.\n";
    for (const auto& key : scene_keys()) out << key << " = " << values.at(key) << "\n";
    return out.str();
}

double number_value(const KeyValues& values, const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError("missing config key '" + key + "'");
    const std::string& text = it->second;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError("config key '" + key + "' is not a number: '" + text + "'");
    }
    return v;
}

std::uint64_t seed_value(const KeyValues& values, const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError("missing config key '" + key + "'");
    const std::string& text = it->second;
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw ConfigError("config key '" + key + "' is not an unsigned integer: '" + text + "'");
    }
    return v;
}

namespace {

int int_value(const KeyValues& values, const std::string& key) {
    const double v = number_value(values, key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("config key '" + key + "' must be an integer");
    return static_cast<int>(v);
}

}  // namespace

SceneConfig scene_from_values(const KeyValues& values) {
    for (const auto& key : scene_keys()) {
        if (!values.count(key)) throw ConfigError("missing config key '" + key + "'");
    }
    for (const auto& [key, value] : values) {
        bool known = false;
        for (const auto& k : scene_keys()) known = known || k == key;
        if (!known) throw ConfigError("unknown config key '" + key + "'");
    }
    const auto num = [&](const char* key) { return number_value(values, key); };
    const auto rad = [&](const char* key) { return deg_to_rad(num(key)); };

    SceneConfig scene;
    try {
        scene.tx = TransmitterSpec(num("half_power_angle_deg"), num("transmit_power_w"), num("screen_width_m"),
                                   num("screen_height_m"), num("screen_frame_rate_hz"));
        scene.geometry = LinkGeometry(num("distance_m"), rad("radiance_angle_deg"), rad("incidence_angle_deg"),
                                      rad("tilt_deg"), rad("rotation_deg"));
        scene.channel = ChannelParams(scene.tx.lambertian_order(), num("receiver_area_m2"), rad("fov_semi_angle_deg"),
                                      num("filter_gain"), num("concentrator_gain"));
        scene.camera = CameraSpec(num("focal_length_px"), int_value(values, "sensor_cols"),
                                  int_value(values, "sensor_rows"), rad("fov_semi_angle_deg"),
                                  num("camera_frame_rate_hz"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid scene: ") + e.what());
    }
    scene.noise.mean = num("noise_mean");
    scene.noise.sigma = num("noise_sigma");
    scene.noise.seed = seed_value(values, "seed");
    scene.blur_sigma_px = num("blur_sigma_px");
    scene.display_extent_m = num("display_extent_m");
    scene.min_feature_px = num("min_feature_px");
    try {
        scene.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid scene: ") + e.what());
    }
    return scene;
}

}  // namespace occsim::cli
