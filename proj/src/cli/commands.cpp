// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "occsim/beam_analysis.hpp"
#include "occsim/bits.hpp"
#include "occsim/cli/app.hpp"
#include "occsim/cli/svg_plot.hpp"
#include "occsim/csv.hpp"
#include "occsim/error.hpp"
#include "occsim/experiment_harness.hpp"
#include "occsim/frame_codec.hpp"
#include "occsim/optics_render.hpp"
#include "occsim/units.hpp"

namespace occsim::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestSuffix = ".manifest";

/// Artifacts are rendered in memory first and written in order only once
/// the whole set exists, so a failing run leaves no partial output.
struct Artifact {
    fs::path path;
    std::string content;
};

using Artifacts = std::vector<Artifact>;

/// Non-artifact outcome of a run that still counts as an error.
struct RunFailure {
    int code;
    std::string message;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

const std::string& param(const RunSpec& run, const std::string& key) {
    const auto it = run.params.find(key);
    if (it == run.params.end()) throw ConfigError("missing parameter '" + key + "'");
    return it->second;
}

bool has_param(const RunSpec& run, const std::string& key) { return run.params.count(key) > 0; }

double number_param(const RunSpec& run, const std::string& key) {
    param(run, key);
    return number_value(run.params, key);
}

int int_param(const RunSpec& run, const std::string& key) {
    const double v = number_param(run, key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
}

std::vector<double> number_list(const RunSpec& run, const std::string& key) {
    std::vector<double> values;
    const auto fields = split_csv_line(param(run, key));
    for (std::size_t i = 0; i < fields.size(); ++i) {
        KeyValues one{{key, fields[i]}};
        values.push_back(number_value(one, key));
    }
    return values;
}

fs::path svg_path_for(const fs::path& csv) {
    fs::path p = csv;
    return p.replace_extension(".svg");
}

std::string pgm_bytes(const GrayImage& image) {
    std::ostringstream out;
    write_pgm(image, out);
    return out.str();
}

std::string svg_text(const PlotSpec& spec) {
    std::ostringstream out;
    write_svg_plot(spec, out);
    return out.str();
}

std::string printable(const std::string& text) {
    std::string out;
    for (unsigned char c : text) {
        if (c >= 0x20 && c < 0x7f) {
            out += static_cast<char>(c);
        } else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\x%02x", c);
            out += buf;
        }
    }
    return out;
}

Bits payload_from_params(const RunSpec& run, const std::string& text_key, const std::string& bits_key) {
    if (has_param(run, bits_key)) return bits_from_string(param(run, bits_key));
    if (has_param(run, text_key)) return text_to_bits(param(run, text_key));
    return {};
}

// --- encode -----------------------------------------------------------------

Artifacts run_encode(const RunSpec& run, std::ostream& out) {
    Bits payload = payload_from_params(run, "text", "bits");
    const FrameLayout layout;
    const std::size_t capacity = layout.capacity_bits();
    if (payload.size() > capacity) {
        if (param(run, "truncate") == "true") {
            payload.resize(capacity);
        } else {
            const std::size_t frames = (payload.size() + capacity - 1) / capacity;
            throw CapacityError("payload is " + std::to_string(payload.size()) + " bits but one frame holds " +
                                    std::to_string(capacity) + " bits; it would need " + std::to_string(frames) +
                                    " frames (use --truncate to keep the first " + std::to_string(capacity) +
                                    " bits)",
                                payload.size(), capacity);
        }
    }
    const BitFrame frame = encode_frame(payload, layout);
    const fs::path path = param(run, "out");
    out << "frame: " << payload.size() << " payload bits, " << frame.padding_bits << " padding bits\n";
    return {{path, pgm_bytes(rasterize_frame(frame))}};
}

// --- transmit ---------------------------------------------------------------

Artifacts run_transmit(const RunSpec& run, std::ostream& out) {
    const SceneConfig scene = scene_from_values(run.scene);
    const GrayImage frame = read_pgm(fs::path(param(run, "frame")));
    const CaptureResult captured = capture(frame, scene);
    if (captured.link_broken) {
        throw RunFailure{kExitLinkBroken, "link broken at " + format_double(scene.geometry.distance_m()) +
                                              " m: " + captured.reason};
    }
    out << "distance: " << format_double(scene.geometry.distance_m()) << " m\n"
        << "relative gain: " << format_double(captured.gain) << "\n"
        << "frame placement: " << captured.placement.x << ' ' << captured.placement.y << ' '
        << captured.placement.width << 'x' << captured.placement.height << "\n";
    return {{fs::path(param(run, "out")), pgm_bytes(captured.image)}};
}

// --- decode -----------------------------------------------------------------

Artifacts run_decode(const RunSpec& run, std::ostream& out) {
    const fs::path image_path = param(run, "image");
    const GrayImage image = read_pgm(image_path);
    const Bits reference = payload_from_params(run, "reference_text", "reference_bits");
    const bool has_reference = has_param(run, "reference_text") || has_param(run, "reference_bits");
    const DecodeReport report =
        has_reference ? decode_frame(image, {}, std::span<const std::uint8_t>(reference)) : decode_frame(image);
    if (!report.roi_found) {
        throw RunFailure{kExitNoFrame, "no frame found in " + image_path.string()};
    }
    std::ostringstream text;
    text << "text: " << printable(bits_to_text(report.bits)) << "\n"
         << "bits: " << bits_to_string(report.bits) << "\n"
         << "roi: " << report.roi_box.x << ' ' << report.roi_box.y << ' ' << report.roi_box.width << 'x'
         << report.roi_box.height << "\n"
         << "threshold: " << format_double(report.threshold) << "\n";
    const auto& margins = report.per_cell_margin;
    const auto [lo, hi] = std::minmax_element(margins.begin(), margins.end());
    const double mean = std::accumulate(margins.begin(), margins.end(), 0.0) / static_cast<double>(margins.size());
    text << "cell margin: min " << format_double(*lo) << " mean " << format_double(mean) << " max "
         << format_double(*hi) << "\n";
    if (report.success_rate_vs_reference) {
        const double rate = *report.success_rate_vs_reference;
        const auto correct = static_cast<long>(std::lround(rate * static_cast<double>(reference.size())));
        text << "success rate: " << format_double(rate) << " (" << correct << '/' << reference.size()
             << " bits)\n";
    }
    out << text.str();
    if (!has_param(run, "report")) return {};
    return {{fs::path(param(run, "report")), text.str()}};
}

// --- sweep / calibrate -------------------------------------------------------

PayloadSource payload_source(const RunSpec& run) {
    const std::string& source = param(run, "payload");
    if (source == "random") return PayloadSource::random_per_trial;
    if (source == "fixed") return PayloadSource::fixed;
    throw ConfigError("payload must be 'random' or 'fixed', got '" + source + "'");
}

Bits fixed_payload(const RunSpec& run) {
    if (payload_source(run) == PayloadSource::fixed && !has_param(run, "text") && !has_param(run, "bits")) {
        throw ConfigError("a fixed payload needs --text or --bits");
    }
    return payload_from_params(run, "text", "bits");
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    write_sweep_csv(result, out);
    return out.str();
}

std::string sweep_svg(const SweepResult& result, const std::string& title) {
    PlotSeries series{"mean success", {}, {}, false};
    for (const auto& r : result.records) {
        series.x.push_back(r.distance_m * 100.0);
        series.y.push_back(r.mean_success);
    }
    return svg_text({title, "link span (cm)", "success rate", {series}});
}

void print_sweep(const SweepResult& result, std::ostream& out) {
    out << "distance_m  mean_success  std_success  link_broken\n";
    for (const auto& r : result.records) {
        char line[128];
        std::snprintf(line, sizeof line, "%-10.4g  %-12.6f  %-11.6f  %d\n", r.distance_m, r.mean_success,
                      r.std_success, r.link_broken);
        out << line;
    }
}

SweepConfig sweep_config(const RunSpec& run, const SceneConfig& scene) {
    SweepConfig config;
    config.distances = number_list(run, "distances");
    config.trials_per_distance = int_param(run, "trials");
    config.threads = int_param(run, "threads");
    config.base_scene = scene;
    config.payload_source = payload_source(run);
    config.fixed_payload = fixed_payload(run);
    config.master_seed = run.seed;
    return config;
}

Artifacts run_sweep(const RunSpec& run, std::ostream& out) {
    const SceneConfig scene = scene_from_values(run.scene);
    const SweepResult result = sweep_distance(sweep_config(run, scene));
    print_sweep(result, out);
    const fs::path csv = param(run, "out");
    return {{csv, sweep_csv(result)},
            {svg_path_for(csv), sweep_svg(result, "Success rate vs link span (sigma " +
                                                      format_double(scene.noise.sigma) + ")")}};
}

Artifacts run_calibrate(const RunSpec& run, std::ostream& out) {
    SceneConfig scene = scene_from_values(run.scene);
    CalibrationOptions options;
    options.trials = int_param(run, "trials");
    options.master_seed = run.seed;
    options.tolerance = number_param(run, "tolerance");
    options.max_probes = int_param(run, "max_probes");
    options.threads = int_param(run, "threads");
    options.payload_source = payload_source(run);
    options.fixed_payload = fixed_payload(run);
    const double distance = number_param(run, "target_distance_m");
    const double target = number_param(run, "target_success");
    const CalibrationResult cal = calibrate_noise(distance, target, scene, options);
    out << "sigma: " << format_double(cal.sigma) << "\n"
        << "mean success at " << format_double(distance) << " m: " << format_double(cal.mean_success) << "\n"
        << "probes: " << cal.probes.size() << "\n";

    std::ostringstream csv;
    csv << "probe,sigma,mean_success\n";
    PlotSeries points{"probes", {}, {}, true};
    for (std::size_t i = 0; i < cal.probes.size(); ++i) {
        csv << i + 1 << ',' << format_double(cal.probes[i].sigma) << ',' << format_double(cal.probes[i].mean_success)
            << "\n";
        points.x.push_back(cal.probes[i].sigma);
        points.y.push_back(cal.probes[i].mean_success);
    }
    const auto [lo, hi] = std::minmax_element(points.x.begin(), points.x.end());
    PlotSeries goal{"target", {*lo, *hi}, {target, target}, false};
    const fs::path csv_path = param(run, "out");
    Artifacts artifacts{{csv_path, csv.str()},
                        {svg_path_for(csv_path),
                         svg_text({"Noise calibration at " + format_double(distance) + " m", "noise sigma",
                                   "mean success", {points, goal}})}};

    if (has_param(run, "sweep_out")) {
        scene.noise.sigma = cal.sigma;
        const SweepResult result = sweep_distance(sweep_config(run, scene));
        print_sweep(result, out);
        const fs::path sweep_path = param(run, "sweep_out");
        artifacts.push_back({sweep_path, sweep_csv(result)});
        artifacts.push_back({svg_path_for(sweep_path),
                             sweep_svg(result, "Success rate vs link span (calibrated sigma " +
                                                   format_double(cal.sigma) + ")")});
    }
    return artifacts;
}

// --- fit / scan / ingest ------------------------------------------------------

AngularProfile read_profile(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_profile_csv(in, path.string());
}

Artifacts run_fit(const RunSpec& run, std::ostream& out) {
    const AngularProfile profile = read_profile(param(run, "profile"));
    const FitResult fit = fit_lambertian(profile);
    char m_text[64];
    std::snprintf(m_text, sizeof m_text, "%.3f", fit.m_hat);
    out << "m_hat=" << m_text << "\n"
        << "m_hat (full precision): " << format_double(fit.m_hat) << "\n"
        << "half-power semi-angle: " << format_double(half_power_semi_angle_deg(fit.m_hat)) << " deg\n"
        << "residual_rms: " << format_double(fit.residual_rms) << "\n"
        << "samples used: " << fit.samples_used << "\n";

    const AngularProfile normalized = normalize_profile(profile);
    std::ostringstream csv;
    csv << "angle_deg,measured,fitted\n";
    PlotSeries measured{"measured", {}, {}, true};
    PlotSeries fitted{"m = " + std::string(m_text), {}, {}, false};
    for (const auto& s : normalized.samples) {
        const double theta = deg_to_rad(std::abs(s.angle_deg - 90.0));
        const double model = fit.amplitude * std::pow(std::max(0.0, std::cos(theta)), fit.m_hat);
        csv << format_double(s.angle_deg) << ',' << format_double(s.power) << ',' << format_double(model) << "\n";
        measured.x.push_back(s.angle_deg);
        measured.y.push_back(s.power);
        fitted.x.push_back(s.angle_deg);
        fitted.y.push_back(model);
    }
    const fs::path csv_path = param(run, "out");
    return {{csv_path, csv.str()},
            {svg_path_for(csv_path),
             svg_text({"Normalized beam profile and Lambertian fit", "angle (deg)", "normalized power",
                       {measured, fitted}})}};
}

Artifacts run_scan(const RunSpec& run, std::ostream& out) {
    const SceneConfig scene = scene_from_values(run.scene);
    ScanOptions options;
    options.arc_radius_m = number_param(run, "arc_radius_m");
    options.lambertian_order =
        has_param(run, "lambertian_order") ? number_param(run, "lambertian_order") : scene.tx.lambertian_order();
    options.n_angles = int_param(run, "n_angles");
    options.grid = int_param(run, "grid");
    options.detector_area_m2 = scene.channel.receiver_area_m2();

    const std::string& which = param(run, "orientation");
    std::vector<std::pair<std::string, ScreenOrientation>> orientations;
    if (which == "portrait" || which == "both") orientations.emplace_back("portrait", ScreenOrientation::portrait);
    if (which == "landscape" || which == "both") orientations.emplace_back("landscape", ScreenOrientation::landscape);
    if (orientations.empty()) throw ConfigError("orientation must be portrait, landscape or both");

    const std::string prefix = param(run, "out_prefix");
    Artifacts artifacts;
    std::vector<PlotSeries> series;
    for (const auto& [name, orientation] : orientations) {
        const AngularProfile profile = angular_power_scan(scene.tx, orientation, options);
        std::ostringstream csv;
        write_profile_csv(profile, csv);
        artifacts.push_back({fs::path(prefix + "_" + name + ".csv"), csv.str()});

        PlotSeries s{name, {}, {}, false};
        double peak = 0.0;
        double peak_angle = 0.0;
        double asymmetry = 0.0;
        for (std::size_t i = 0; i < profile.samples.size(); ++i) {
            const auto& sample = profile.samples[i];
            s.x.push_back(sample.angle_deg);
            s.y.push_back(sample.power);
            if (sample.power > peak) {
                peak = sample.power;
                peak_angle = sample.angle_deg;
            }
            const auto& mirror = profile.samples[profile.samples.size() - 1 - i];
            asymmetry = std::max(asymmetry, std::abs(sample.power - mirror.power));
        }
        series.push_back(std::move(s));
        out << name << ": peak " << format_double(peak) << " uW at " << format_double(peak_angle)
            << " deg, max asymmetry " << format_double(peak > 0.0 ? asymmetry / peak : 0.0) << " of peak\n";
    }
    artifacts.push_back({fs::path(prefix + ".svg"),
                         svg_text({"Received power across the arc (radius " + format_double(options.arc_radius_m) +
                                       " m)",
                                   "detector angle (deg)", "received power (uW)", series})});
    return artifacts;
}

Artifacts run_ingest(const RunSpec& run, std::ostream& out) {
    const Measurements data = ingest_measurements(fs::path(param(run, "input")));
    const fs::path csv_path = param(run, "out");
    if (const auto* sweep = std::get_if<SweepResult>(&data)) {
        out << "sweep measurements: " << sweep->records.size() << " distances\n";
        print_sweep(*sweep, out);
        return {{csv_path, sweep_csv(*sweep)}, {svg_path_for(csv_path), sweep_svg(*sweep, "Measured success rate")}};
    }
    const auto& profile = std::get<AngularProfile>(data);
    out << "angular profile: " << profile.samples.size() << " samples, unit " << profile.unit << "\n";
    std::ostringstream csv;
    write_profile_csv(profile, csv);
    PlotSeries s{"measured", {}, {}, false};
    for (const auto& sample : profile.samples) {
        s.x.push_back(sample.angle_deg);
        s.y.push_back(sample.power);
    }
    const std::string unit = profile.unit == "norm" ? "normalized power" : "received power (uW)";
    return {{csv_path, csv.str()},
            {svg_path_for(csv_path), svg_text({"Measured angular profile", "detector angle (deg)", unit, {s}})}};
}

Artifacts dispatch(const RunSpec& run, std::ostream& out) {
    if (run.command == "encode") return run_encode(run, out);
    if (run.command == "transmit") return run_transmit(run, out);
    if (run.command == "decode") return run_decode(run, out);
    if (run.command == "sweep") return run_sweep(run, out);
    if (run.command == "calibrate") return run_calibrate(run, out);
    if (run.command == "fit") return run_fit(run, out);
    if (run.command == "scan") return run_scan(run, out);
    if (run.command == "ingest") return run_ingest(run, out);
    throw ConfigError("unknown command '" + run.command + "'");
}

}  // namespace

void write_manifest(const RunSpec& run, const std::vector<fs::path>& outputs, std::ostream& out) {
    out << "# occsim run manifest; replay with: occsim replay <this file>\n"
        << "command = " << run.command << "\n"
        << "version = " << kVersion << "\n"
        << "seed = " << run.seed << "\n";
    for (const auto& [key, value] : run.params) out << "param." << key << " = " << value << "\n";
    for (const auto& key : scene_keys()) {
        if (const auto it = run.scene.find(key); it != run.scene.end()) {
            out << "scene." << key << " = " << it->second << "\n";
        }
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        out << "output." << i + 1 << " = " << outputs[i].string() << "\n";
    }
}

RunSpec read_manifest(const fs::path& path) {
    const KeyValues values = read_key_values(path);
    RunSpec run;
    const auto command = values.find("command");
    if (command == values.end()) throw ConfigError(path.string() + ": manifest has no 'command'");
    run.command = command->second;
    if (const auto v = values.find("version"); v == values.end() || v->second != kVersion) {
        throw ConfigError(path.string() + ": manifest was written by a different version");
    }
    run.seed = seed_value(values, "seed");
    for (const auto& [key, value] : values) {
        if (key.rfind("param.", 0) == 0) run.params[key.substr(6)] = value;
        if (key.rfind("scene.", 0) == 0) run.scene[key.substr(6)] = value;
    }
    return run;
}

int execute(const RunSpec& run, std::ostream& out, std::ostream& err) {
    try {
        const Artifacts artifacts = dispatch(run, out);
        if (artifacts.empty()) return kExitOk;
        std::vector<fs::path> paths;
        for (const auto& a : artifacts) {
            write_file(a.path, a.content);
            paths.push_back(a.path);
        }
        std::ostringstream manifest;
        write_manifest(run, paths, manifest);
        const fs::path manifest_path = fs::path(artifacts.front().path.string() + kManifestSuffix);
        write_file(manifest_path, manifest.str());
        for (const auto& p : paths) out << "wrote " << p.string() << "\n";
        out << "wrote " << manifest_path.string() << "\n";
        return kExitOk;
    } catch (const RunFailure& f) {
        err << "error: " << f.message << "\n";
        return f.code;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace occsim::cli
