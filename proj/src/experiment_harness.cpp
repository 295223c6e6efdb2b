// SPDX-License-Identifier: Apache-2.0
#include "occsim/experiment_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <thread>

#include "occsim/csv.hpp"
#include "occsim/error.hpp"
#include "occsim/numeric.hpp"
#include "occsim/random.hpp"

namespace occsim {

TrialOutcome run_trial(const SceneConfig& scene, std::span<const std::uint8_t> payload, std::uint64_t seed,
                       const FrameLayout& layout) {
    const BitFrame frame = encode_frame(payload, layout);
    const GrayImage tx_image = rasterize_frame(frame);
    SceneConfig seeded = scene;
    seeded.noise.seed = seed;
    const CaptureResult captured = capture(tx_image, seeded);
    TrialOutcome outcome;
    if (captured.link_broken) {
        outcome.link_broken = true;
        return outcome;
    }
    const DecodeReport report = decode_frame(captured.image, layout, payload);
    outcome.roi_found = report.roi_found;
    if (report.roi_found) {
        outcome.success = *report.success_rate_vs_reference;
    }
    return outcome;
}

std::vector<double> default_sweep_distances() {
    std::vector<double> d;
    for (int cm = 10; cm <= 55; cm += 5) d.push_back(cm / 100.0);
    return d;
}

void SweepConfig::validate() const {
    if (distances.empty()) throw DomainError("sweep needs at least one distance");
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (!(distances[i] > 0.0)) throw DomainError("sweep distances must be > 0");
        if (i > 0 && !(distances[i] > distances[i - 1])) {
            throw DomainError("sweep distances must be strictly increasing");
        }
    }
    if (trials_per_distance <= 0) throw DomainError("trials per distance must be > 0");
    if (threads <= 0) throw DomainError("thread count must be > 0");
    base_scene.validate();
}

namespace {

Bits trial_payload(PayloadSource source, const Bits& fixed, std::uint64_t master_seed, int trial,
                   const FrameLayout& layout) {
    if (source == PayloadSource::fixed) return fixed;
    RandomSource rng(hash64(master_seed, kPayloadStream, static_cast<std::uint64_t>(trial)));
    Bits bits(layout.capacity_bits());
    for (auto& b : bits) b = rng.bit() ? 1 : 0;
    return bits;
}

// Runs job(i) for i in [0, count) on up to `threads` workers. Each job writes
// only its own output slot, so results do not depend on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& job) {
    const int workers = std::min(threads, count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) job(i);
        });
    }
}

struct Batch {
    std::vector<double> success;
    int link_broken = 0;
};

Batch run_batch(const SceneConfig& scene, int trials, std::uint64_t master_seed, std::uint64_t distance_index,
                PayloadSource source, const Bits& fixed, const FrameLayout& layout, int threads) {
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
    parallel_for(trials, threads, [&](int t) {
        const Bits payload = trial_payload(source, fixed, master_seed, t, layout);
        outcomes[t] = run_trial(scene, payload, hash64(master_seed, distance_index, static_cast<std::uint64_t>(t)),
                                layout);
    });
    Batch batch;
    batch.success.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        batch.success.push_back(o.success);
        batch.link_broken += o.link_broken ? 1 : 0;
    }
    return batch;
}

double mean_of(const std::vector<double>& v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

double sample_std(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    std::vector<double> sq(v.size());
    std::transform(v.begin(), v.end(), sq.begin(), [mean](double x) { return (x - mean) * (x - mean); });
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1));
}

}  // namespace

SweepResult sweep_distance(const SweepConfig& config) {
    config.validate();
    SweepResult result;
    for (std::size_t i = 0; i < config.distances.size(); ++i) {
        SceneConfig scene = config.base_scene;
        scene.geometry = scene.geometry.at_distance(config.distances[i]);
        const Batch batch = run_batch(scene, config.trials_per_distance, config.master_seed, i, config.payload_source,
                                      config.fixed_payload, config.layout, config.threads);
        SweepRecord record;
        record.distance_m = config.distances[i];
        record.mean_success = mean_of(batch.success);
        record.std_success = sample_std(batch.success, record.mean_success);
        record.trials = config.trials_per_distance;
        record.link_broken = batch.link_broken;
        result.records.push_back(record);
    }
    return result;
}

CalibrationResult calibrate_noise(double target_distance_m, double target_success, const SceneConfig& scene,
                                  const CalibrationOptions& options) {
    if (!(target_success > 0.0 && target_success < 1.0)) {
        throw DomainError("target success must lie strictly inside (0, 1)");
    }
    if (options.trials <= 0 || options.max_probes < 2 || !(options.tolerance > 0.0)) {
        throw DomainError("invalid calibration options");
    }
    SceneConfig probe_scene = scene;
    probe_scene.geometry = probe_scene.geometry.at_distance(target_distance_m);
    probe_scene.validate();

    CalibrationResult result;
    auto probe = [&](double sigma) {
        probe_scene.noise.sigma = sigma;
        const Batch batch = run_batch(probe_scene, options.trials, options.master_seed, 0, options.payload_source,
                                      options.fixed_payload, options.layout, options.threads);
        const double mean = mean_of(batch.success);
        result.probes.push_back({sigma, mean});
        return mean;
    };
    auto budget_left = [&] { return static_cast<int>(result.probes.size()) < options.max_probes; };
    auto close_enough = [&](double mean) { return std::abs(mean - target_success) <= 0.25 * options.tolerance; };

    const double ceiling = probe(0.0);
    if (ceiling < target_success - options.tolerance) {
        throw DomainError("target success " + format_double(target_success) + " unreachable: noiseless success is " +
                          format_double(ceiling));
    }

    double lo = 0.0;
    double hi = 0.05;
    bool done = close_enough(ceiling) && ceiling <= target_success;
    while (!done && budget_left()) {
        const double mean = probe(hi);
        if (close_enough(mean)) {
            done = true;
        } else if (mean >= target_success) {
            lo = hi;
            hi *= 2.0;
        } else {
            break;
        }
    }
    while (!done && budget_left()) {
        const double mid = 0.5 * (lo + hi);
        const double mean = probe(mid);
        if (close_enough(mean)) {
            done = true;
        } else if (mean >= target_success) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    const auto best = std::min_element(result.probes.begin(), result.probes.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.mean_success - target_success) < std::abs(b.mean_success - target_success);
    });
    if (std::abs(best->mean_success - target_success) > options.tolerance) {
        throw DomainError("calibration did not reach the target within tolerance");
    }
    result.sigma = best->sigma;
    result.mean_success = best->mean_success;
    return result;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
    out << "distance_m,mean_success,std_success,trials,link_broken\n";
    for (const auto& r : result.records) {
        out << format_double(r.distance_m) << ',' << format_double(r.mean_success) << ','
            << format_double(r.std_success) << ',' << r.trials << ',' << r.link_broken << "\n";
    }
}

namespace {

const std::vector<std::string> kMeasuredSweepHeader{"distance_m", "success_rate"};
const std::vector<std::string> kExportSweepHeader{"distance_m", "mean_success", "std_success", "trials",
                                                  "link_broken"};
const std::vector<std::string> kProfileHeader{"angle_deg", "power"};

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
    return out;
}

bool is_count(double v) { return v >= 0.0 && v == std::floor(v) && v < 2147483647.0; }

SweepResult sweep_from_csv(const NumericCsv& csv, const std::string& source) {
    const bool measured = csv.header == kMeasuredSweepHeader;
    SweepResult result;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        const auto& row = csv.rows[i];
        const std::size_t line = csv.row_lines[i];
        SweepRecord r;
        r.distance_m = row[0];
        r.mean_success = row[1];
        r.trials = 1;
        if (!measured) {
            r.std_success = row[2];
            if (!is_count(row[3]) || row[3] < 1.0) throw ParseError(source, line, "trials must be a positive integer");
            if (!is_count(row[4])) throw ParseError(source, line, "link_broken must be a non-negative integer");
            r.trials = static_cast<int>(row[3]);
            r.link_broken = static_cast<int>(row[4]);
            if (!(r.std_success >= 0.0)) throw ParseError(source, line, "std_success must be >= 0");
        }
        if (!(r.distance_m > 0.0)) throw ParseError(source, line, "distance must be > 0");
        if (!(r.mean_success >= 0.0 && r.mean_success <= 1.0)) {
            throw ParseError(source, line, "success rate must lie in [0, 1]");
        }
        if (!result.records.empty() && !(r.distance_m > result.records.back().distance_m)) {
            throw ParseError(source, line, "distances must be strictly increasing");
        }
        result.records.push_back(r);
    }
    return result;
}

}  // namespace

Measurements ingest_measurements(std::istream& in, const std::string& source) {
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    // Check the schema before parsing rows so an unknown header is reported
    // as such even when the rows would not parse either.
    std::istringstream probe(text);
    const std::vector<std::string> header = read_csv_header(probe);
    std::istringstream body(text);
    if (header == kProfileHeader) {
        return read_profile_csv(body, source);
    }
    if (header != kMeasuredSweepHeader && header != kExportSweepHeader) {
        throw SchemaError(source + ": unknown CSV header '" + join(header) + "'");
    }
    return sweep_from_csv(read_numeric_csv(body, source), source);
}

Measurements ingest_measurements(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return ingest_measurements(in, path.string());
}

}  // namespace occsim
