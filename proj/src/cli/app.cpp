// SPDX-License-Identifier: Apache-2.0
#include "occsim/cli/app.hpp"

#include <CLI11.hpp>

#include <ostream>

#include "occsim/csv.hpp"
#include "occsim/experiment_harness.hpp"

namespace occsim::cli {

namespace {

struct SceneFlags {
    std::string scene_file;
    std::vector<std::string> overrides;
    double distance = 0.0;
    double sigma = 0.0;
    double blur = 0.0;
    CLI::Option* distance_opt = nullptr;
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* blur_opt = nullptr;
};

void add_scene_flags(CLI::App* cmd, SceneFlags& flags) {
    cmd->add_option("--scene", flags.scene_file, "Scene config file (key = value); built-in desk scene if omitted")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", flags.overrides, "Override a scene key, e.g. --set noise_sigma=0.1 (repeatable)");
    flags.distance_opt = cmd->add_option("--distance", flags.distance, "Link span in metres (scene distance_m)");
    flags.sigma_opt = cmd->add_option("--sigma", flags.sigma, "Pixel noise sigma (scene noise_sigma)");
    flags.blur_opt = cmd->add_option("--blur", flags.blur, "Defocus blur sigma in pixels (scene blur_sigma_px)");
}

KeyValues resolve_scene(const SceneFlags& flags) {
    KeyValues scene = flags.scene_file.empty() ? default_scene_values() : read_key_values(flags.scene_file);
    for (const auto& item : flags.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + item + "'");
        const std::string key(trim(std::string_view(item).substr(0, eq)));
        const std::string value(trim(std::string_view(item).substr(eq + 1)));
        bool known = false;
        for (const auto& k : scene_keys()) known = known || k == key;
        if (!known) throw ConfigError("unknown config key '" + key + "'");
        scene[key] = value;
    }
    if (flags.distance_opt->count()) scene["distance_m"] = format_double(flags.distance);
    if (flags.sigma_opt->count()) scene["noise_sigma"] = format_double(flags.sigma);
    if (flags.blur_opt->count()) scene["blur_sigma_px"] = format_double(flags.blur);
    return scene;
}

std::string join_numbers(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_double(values[i]);
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Screen-to-camera visible light link simulator"};
    app.name("occsim");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    RunSpec run;

    // encode
    auto* encode = app.add_subcommand("encode", "Render a payload as a 200x200 frame PGM");
    std::string text;
    std::string bits;
    bool truncate = false;
    std::string out_path;
    auto* text_opt = encode->add_option("--text", text, "ASCII payload, MSB first");
    auto* bits_opt = encode->add_option("--bits", bits, "Payload as a string of 0/1");
    text_opt->excludes(bits_opt);
    encode->add_flag("--truncate", truncate, "Keep only the first 182 bits of a longer payload");
    encode->add_option("-o,--out", out_path, "Output PGM")->required();

    // transmit
    auto* transmit = app.add_subcommand("transmit", "Capture a frame PGM through the simulated link");
    std::string frame_path;
    SceneFlags transmit_scene;
    std::string transmit_out;
    transmit->add_option("--frame", frame_path, "Transmitted frame PGM")->required()->check(CLI::ExistingFile);
    add_scene_flags(transmit, transmit_scene);
    transmit->add_option("-o,--out", transmit_out, "Captured PGM")->required();
    auto* transmit_seed = transmit->add_option("--seed", seed, "Noise seed (overrides the scene seed)");

    // decode
    auto* decode = app.add_subcommand("decode", "Locate and decode a frame in a captured PGM");
    std::string image_path;
    std::string ref_text;
    std::string ref_bits;
    std::string report_path;
    decode->add_option("--image", image_path, "Captured PGM")->required()->check(CLI::ExistingFile);
    auto* ref_text_opt = decode->add_option("--reference-text", ref_text, "Sent text, for the success rate");
    auto* ref_bits_opt = decode->add_option("--reference-bits", ref_bits, "Sent bits, for the success rate");
    ref_text_opt->excludes(ref_bits_opt);
    auto* report_opt = decode->add_option("--report", report_path, "Also write the report to this file");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo success rate over link spans");
    SceneFlags sweep_scene;
    std::vector<double> distances = default_sweep_distances();
    int trials = 200;
    int threads = 1;
    std::string payload = "random";
    std::string payload_text;
    std::string payload_bits;
    std::string sweep_out = "sweep.csv";
    add_scene_flags(sweep, sweep_scene);
    sweep->add_option("--distances", distances, "Link spans in metres")->delimiter(',')->capture_default_str();
    sweep->add_option("--trials", trials, "Trials per distance")->capture_default_str();
    sweep->add_option("--threads", threads, "Worker threads (results do not depend on it)")->capture_default_str();
    sweep->add_option("--payload", payload, "random (per trial) or fixed")
        ->check(CLI::IsMember({"random", "fixed"}))
        ->capture_default_str();
    auto* sweep_text = sweep->add_option("--text", payload_text, "Fixed payload text");
    auto* sweep_bits = sweep->add_option("--bits", payload_bits, "Fixed payload bits");
    sweep_text->excludes(sweep_bits);
    sweep->add_option("-o,--out", sweep_out, "Output CSV; the SVG plot goes next to it")->capture_default_str();
    auto* sweep_seed = sweep->add_option("--seed", seed, "Master seed (overrides the scene seed)");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "Find the noise sigma giving a target success rate");
    SceneFlags cal_scene;
    double target_distance = 0.4;
    double target_success = 0.98;
    double tolerance = 0.01;
    int max_probes = 30;
    int cal_trials = 200;
    int cal_threads = 1;
    std::string cal_payload = "random";
    std::string cal_text;
    std::string cal_bits;
    std::string cal_out = "calibration.csv";
    std::string cal_sweep_out;
    std::vector<double> cal_distances = default_sweep_distances();
    add_scene_flags(calibrate, cal_scene);
    calibrate->add_option("--target-distance", target_distance, "Anchor link span in metres")->capture_default_str();
    calibrate->add_option("--target", target_success, "Target mean success in (0, 1)")->capture_default_str();
    calibrate->add_option("--tolerance", tolerance, "Accepted |success - target|")->capture_default_str();
    calibrate->add_option("--max-probes", max_probes, "Probe budget")->capture_default_str();
    calibrate->add_option("--trials", cal_trials, "Trials per probe")->capture_default_str();
    calibrate->add_option("--threads", cal_threads, "Worker threads")->capture_default_str();
    calibrate->add_option("--payload", cal_payload, "random (per trial) or fixed")
        ->check(CLI::IsMember({"random", "fixed"}))
        ->capture_default_str();
    auto* cal_text_opt = calibrate->add_option("--text", cal_text, "Fixed payload text");
    auto* cal_bits_opt = calibrate->add_option("--bits", cal_bits, "Fixed payload bits");
    cal_text_opt->excludes(cal_bits_opt);
    calibrate->add_option("-o,--out", cal_out, "Probe CSV; the SVG plot goes next to it")->capture_default_str();
    auto* cal_sweep_opt =
        calibrate->add_option("--sweep-out", cal_sweep_out, "Also sweep at the calibrated sigma into this CSV");
    calibrate->add_option("--distances", cal_distances, "Link spans for --sweep-out")
        ->delimiter(',')
        ->capture_default_str();
    auto* cal_seed = calibrate->add_option("--seed", seed, "Master seed (overrides the scene seed)");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a Lambertian order to an angular profile CSV");
    std::string profile_path;
    std::string fit_out = "fit.csv";
    fit->add_option("--profile", profile_path, "CSV with angle_deg,power")->required()->check(CLI::ExistingFile);
    fit->add_option("-o,--out", fit_out, "Normalized data and fitted curve CSV")->capture_default_str();
    auto* fit_seed = fit->add_option("--seed", seed, "Recorded in the manifest; the fit is deterministic");

    // scan
    auto* scan = app.add_subcommand("scan", "Simulated received power over a 0-180 deg arc");
    SceneFlags scan_scene;
    std::string orientation = "both";
    double arc_radius = 0.2;
    double order = 1.0;
    int n_angles = 181;
    int grid = 64;
    std::string prefix = "scan";
    add_scene_flags(scan, scan_scene);
    scan->add_option("--orientation", orientation, "portrait, landscape or both")
        ->check(CLI::IsMember({"portrait", "landscape", "both"}))
        ->capture_default_str();
    scan->add_option("--radius", arc_radius, "Arc radius in metres")->capture_default_str();
    auto* order_opt = scan->add_option("--order", order, "Emitter Lambertian order (default from the scene)");
    scan->add_option("--angles", n_angles, "Arc samples over 0-180 deg")->capture_default_str();
    scan->add_option("--grid", grid, "Emitter elements per screen side")->capture_default_str();
    scan->add_option("--out-prefix", prefix, "Writes <prefix>_<orientation>.csv and <prefix>.svg")
        ->capture_default_str();
    auto* scan_seed = scan->add_option("--seed", seed, "Recorded in the manifest; the scan is deterministic");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Validate measured CSV data and re-export it with a plot");
    std::string input_path;
    std::string ingest_out = "ingested.csv";
    ingest->add_option("--input", input_path, "Measured CSV")->required()->check(CLI::ExistingFile);
    ingest->add_option("-o,--out", ingest_out, "Canonical CSV; the SVG plot goes next to it")->capture_default_str();
    auto* ingest_seed = ingest->add_option("--seed", seed, "Recorded in the manifest");

    // replay
    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    std::string manifest_path;
    replay->add_option("manifest", manifest_path, "Manifest file")->required()->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitFailure;
    }

    try {
        const auto seed_or = [&](CLI::Option* opt, const KeyValues& scene) {
            if (opt->count()) return seed;
            return scene.count("seed") ? seed_value(scene, "seed") : std::uint64_t{1};
        };
        const auto apply_seed = [&](CLI::Option* opt) {
            run.seed = seed_or(opt, run.scene);
            if (!run.scene.empty()) run.scene["seed"] = std::to_string(run.seed);
        };

        if (encode->parsed()) {
            run.command = "encode";
            if (text_opt->count()) run.params["text"] = text;
            if (bits_opt->count()) run.params["bits"] = bits;
            run.params["truncate"] = truncate ? "true" : "false";
            run.params["out"] = out_path;
        } else if (transmit->parsed()) {
            run.command = "transmit";
            run.scene = resolve_scene(transmit_scene);
            apply_seed(transmit_seed);
            run.params["frame"] = frame_path;
            run.params["out"] = transmit_out;
        } else if (decode->parsed()) {
            run.command = "decode";
            run.params["image"] = image_path;
            if (ref_text_opt->count()) run.params["reference_text"] = ref_text;
            if (ref_bits_opt->count()) run.params["reference_bits"] = ref_bits;
            if (report_opt->count()) run.params["report"] = report_path;
        } else if (sweep->parsed()) {
            run.command = "sweep";
            run.scene = resolve_scene(sweep_scene);
            apply_seed(sweep_seed);
            run.params["distances"] = join_numbers(distances);
            run.params["trials"] = std::to_string(trials);
            run.params["threads"] = std::to_string(threads);
            run.params["payload"] = payload;
            if (sweep_text->count()) run.params["text"] = payload_text;
            if (sweep_bits->count()) run.params["bits"] = payload_bits;
            run.params["out"] = sweep_out;
        } else if (calibrate->parsed()) {
            run.command = "calibrate";
            run.scene = resolve_scene(cal_scene);
            apply_seed(cal_seed);
            run.params["target_distance_m"] = format_double(target_distance);
            run.params["target_success"] = format_double(target_success);
            run.params["tolerance"] = format_double(tolerance);
            run.params["max_probes"] = std::to_string(max_probes);
            run.params["trials"] = std::to_string(cal_trials);
            run.params["threads"] = std::to_string(cal_threads);
            run.params["payload"] = cal_payload;
            if (cal_text_opt->count()) run.params["text"] = cal_text;
            if (cal_bits_opt->count()) run.params["bits"] = cal_bits;
            run.params["out"] = cal_out;
            if (cal_sweep_opt->count()) {
                run.params["sweep_out"] = cal_sweep_out;
                run.params["distances"] = join_numbers(cal_distances);
            }
        } else if (fit->parsed()) {
            run.command = "fit";
            run.seed = seed_or(fit_seed, {});
            run.params["profile"] = profile_path;
            run.params["out"] = fit_out;
        } else if (scan->parsed()) {
            run.command = "scan";
            run.scene = resolve_scene(scan_scene);
            apply_seed(scan_seed);
            run.params["orientation"] = orientation;
            run.params["arc_radius_m"] = format_double(arc_radius);
            if (order_opt->count()) run.params["lambertian_order"] = format_double(order);
            run.params["n_angles"] = std::to_string(n_angles);
            run.params["grid"] = std::to_string(grid);
            run.params["out_prefix"] = prefix;
        } else if (ingest->parsed()) {
            run.command = "ingest";
            run.seed = seed_or(ingest_seed, {});
            run.params["input"] = input_path;
            run.params["out"] = ingest_out;
        } else if (replay->parsed()) {
            run = read_manifest(manifest_path);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return execute(run, out, err);
}

}  // namespace occsim::cli
