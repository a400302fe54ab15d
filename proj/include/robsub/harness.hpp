#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "robsub/doa_metrics.hpp"
#include "robsub/lambda_design.hpp"
#include "robsub/penalty.hpp"
#include "robsub/signal_sim.hpp"
#include "robsub/solver.hpp"

namespace robsub {

/// git describe of the build, or "unknown".
const char* version() noexcept;

/// Flat scenario parameters as they appear in config files and on the command line.
struct ScenarioParams {
    Index m = 50;
    Index d = 1;
    Index n = 100000;
    double spacing_wavelengths = 0.25;
    double signal_freq_hz = 300.0;
    double sample_rate_hz = 10000.0;
    double doa_rad = 0.7853981633974483;
    double sigma_eps = 0.7071067811865476;
    std::string regime = "random";
    /// Regime defaults when unset: random p = 0.33, directed regimes p = 0.1.
    std::optional<double> p;
    double sigma_delta = 1.4142135623730951;
    double s_delta = 1.0;
    double doa_interf_rad = 1.5707963267948966;
    std::uint64_t seed = 1;

    ScenarioConfig to_config(std::uint64_t seed_override) const;
    double probability() const;
};

struct Sweep {
    std::string key;
    std::vector<double> values;
};

struct ExperimentSpec {
    ScenarioParams scenario;
    double q = 0.1;
    NoiseConvention convention = NoiseConvention::Circular;
    /// Noise scale used for the penalty; defaults to scenario.sigma_eps.
    std::optional<double> lambda_sigma;
    double eta = 1e-6;
    int max_iterations = 500;
    int replications = 1;
    std::optional<Sweep> sweep;
    std::filesystem::path output_dir = "out";
    unsigned threads = 0;
    double doa_grid = kDefaultDoaGrid;
    bool save_dataset = true;

    void validate() const;
    LambdaSpec lambda_spec() const;
    SolverConfig solver_config() const;
    /// Seed of replication k: scenario.seed + k.
    std::uint64_t replication_seed(int k) const;
};

/// Reads a JSON experiment file (schema in docs/FORMATS.md). Unknown keys are rejected.
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Sets one parameter by name. Accepted keys: p, sigma_delta, s_delta, q, n, m, d, eta,
/// max_iters, seed, reps.
void apply_override(ExperimentSpec& spec, const std::string& key, double value);

/// Parses "KEY=v1,v2,..."; throws on an empty list or an unsupported key.
Sweep parse_sweep(const std::string& text);

/// Detection on given data: solve, flag the support, refit on the unflagged
/// snapshots and on all snapshots, and read off both DOAs when d = 1.
DetectionReport detect(const SnapshotMatrix& X, Index d, const PenaltyVector& lam, const SolverConfig& cfg,
                       const ArrayGeometry& geom, const std::vector<bool>* truth, double doa_grid);

struct RunRecord {
    int replication = 0;
    std::uint64_t seed = 0;
    std::optional<double> sweep_value;
    DetectionReport report;
    double total_seconds = 0.0;
};

/// Full pipeline for one replication: generate -> chi-quantile penalty -> solve -> refit.
RunRecord run_replication(const ExperimentSpec& spec, int replication);

/// All replications of the experiment (no sweep). Writes report.csv, report.txt, timing.csv,
/// lambda.txt and, if save_dataset, dataset.bin + labels.txt of replication 0.
std::vector<RunRecord> run_single(const ExperimentSpec& spec);

/// One row per (sweep value, replication) into sweep.csv and timing.csv.
std::vector<RunRecord> run_sweep(const ExperimentSpec& spec);

/// Timing runs for each n in `ns`; writes timing.csv.
std::vector<RunRecord> run_bench(const ExperimentSpec& spec, const std::vector<Index>& ns);

// CSV serialization, exposed for tests.
std::string report_csv_header(bool with_sweep);
std::string report_csv_row(const ExperimentSpec& spec, const RunRecord& rec, bool with_sweep);
std::string timing_csv_header();
std::string timing_csv_row(const ExperimentSpec& spec, const RunRecord& rec);
std::string report_key_values(const ExperimentSpec& spec, const RunRecord& rec);

} // namespace robsub
