// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo link trials: single end-to-end trials, distance sweeps,
// noise calibration against a target success rate, and ingestion of
// externally measured CSV data.
//
// Seed splitting: the trial at distance index i, trial index t uses
//   noise seed   = hash64(master_seed, i, t)
//   payload seed = hash64(master_seed, kPayloadStream, t)
// so every distance sees the same payload sequence. hash64 is defined in
// occsim/random.hpp.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "occsim/beam_analysis.hpp"
#include "occsim/bits.hpp"
#include "occsim/frame_codec.hpp"
#include "occsim/optics_render.hpp"

namespace occsim {

inline constexpr std::uint64_t kPayloadStream = 0xFFFF'FFFF'FFFF'FFFFULL;

enum class PayloadSource { fixed, random_per_trial };

struct TrialOutcome {
    double success = 0.0;
    bool link_broken = false;
    bool roi_found = false;
};

/// encode -> rasterize -> capture -> decode -> success_rate. The scene's
/// noise seed is replaced by `seed`. Broken links and undetected frames
/// score 0.
TrialOutcome run_trial(const SceneConfig& scene, std::span<const std::uint8_t> payload, std::uint64_t seed,
                       const FrameLayout& layout = {});

/// 0.10, 0.15, ..., 0.55 m.
std::vector<double> default_sweep_distances();

struct SweepConfig {
    std::vector<double> distances = default_sweep_distances();
    int trials_per_distance = 200;
    SceneConfig base_scene;
    PayloadSource payload_source = PayloadSource::random_per_trial;
    Bits fixed_payload;  ///< used when payload_source == fixed
    std::uint64_t master_seed = 1;
    int threads = 1;
    FrameLayout layout;

    void validate() const;
};

struct SweepRecord {
    double distance_m = 0.0;
    double mean_success = 0.0;
    double std_success = 0.0;  ///< sample standard deviation over trials
    int trials = 0;
    int link_broken = 0;
};

struct SweepResult {
    std::vector<SweepRecord> records;
};

/// Deterministic for a fixed master seed at any thread count.
SweepResult sweep_distance(const SweepConfig& config);

struct CalibrationOptions {
    int trials = 200;
    std::uint64_t master_seed = 1;
    double tolerance = 0.01;
    int max_probes = 30;
    int threads = 1;
    PayloadSource payload_source = PayloadSource::random_per_trial;
    Bits fixed_payload;
    FrameLayout layout;
};

struct CalibrationProbe {
    double sigma;
    double mean_success;
};

struct CalibrationResult {
    double sigma = 0.0;
    double mean_success = 0.0;
    std::vector<CalibrationProbe> probes;
};

/// Noise sigma giving `target_success` mean success at `target_distance_m`.
///
/// Every probe reuses the same trial seeds, so success falls smoothly as
/// sigma grows. The bracket starts at [0, 0.05] and doubles its upper end
/// until success drops below target, then bisects until a probe lands within
/// tolerance / 4 or max_probes are spent. The probe nearest the target is
/// returned. Throws DomainError unless 0 < target < 1, when the noiseless
/// ceiling sits below target - tolerance, or when no probe got within
/// tolerance.
CalibrationResult calibrate_noise(double target_distance_m, double target_success, const SceneConfig& scene,
                                  const CalibrationOptions& options = {});

/// `distance_m,mean_success,std_success,trials,link_broken`
void write_sweep_csv(const SweepResult& result, std::ostream& out);

using Measurements = std::variant<SweepResult, AngularProfile>;

/// Accepts `distance_m,success_rate`, the sweep export schema, or
/// `angle_deg,power`. Unknown headers raise SchemaError; bad fields raise
/// ParseError naming the line.
Measurements ingest_measurements(std::istream& in, const std::string& source = "<csv>");
Measurements ingest_measurements(const std::filesystem::path& path);

}  // namespace occsim
