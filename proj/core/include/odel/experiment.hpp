#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "odel/adversaries.hpp"
#include "odel/core.hpp"
#include "odel/verify.hpp"

namespace odel {

enum class Mode { balance, multicolor, envy, lowerbound, verify };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& name);

/// One probe request for `verify` mode.
struct ProbeConfig {
    std::string probe; // concentration | halls | order_stat | orthogonality | tree_oracle
    long long K = 1000;
    long long L = 10;
    int c = 2;
    DistributionSpec dist = DistributionSpec::uniform01();
    long long trials = 100000;
    long long instances = 100000;
    int n = 2;
    long long samples = 1000000;
    double tol = 0.005;
    int d = 3;
    double delta = 0.1;
    double floor = 0.01;
    double bound = 3.0;
};

/// Full description of one experiment; every field has a default and the
/// resolved configuration is echoed into all outputs.
struct ExperimentConfig {
    Mode mode = Mode::envy;
    std::string algorithm = "two_phase";
    std::string adversary = "iid";
    DistributionSpec dist = DistributionSpec::uniform01();

    int n = 2;
    int d = 2;
    long long T = 1000;
    std::vector<std::uint64_t> seeds = {1};

    double c_param = 0.0; // 0 = auto: 30 ln(2 max(d,2) T)
    double c = 1.0;       // envy threshold constant
    double r = 0.5;       // adaptive adversary exponent
    long long K = 0;      // astar policy parameter
    double delta = 0.5;   // oblivious sampled adversary
    VectorScale scale = VectorScale::inv_sqrt_d;
    double log_base = 2.718281828459045;

    std::string stream_path; // replay adversary input
    std::string out_dir;     // empty = no files written
    long long record_every = 1;
    bool quiet = false;

    std::vector<long long> sweep_T;   // sweep grid
    std::vector<ProbeConfig> probes;  // verify battery; empty = defaults

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json_text() const;

    /// Rejects unknown algorithm/adversary names and invalid sizes before
    /// anything runs.
    void validate() const;
};

/// Outcome of one seeded run.
struct RunResult {
    std::uint64_t seed = 0;
    bool failed = false; // non-finite metric mid-run
    double final_metric = 0.0;
    double max_metric = 0.0;
    std::map<std::string, double> monitors;
    std::vector<ExperimentRecord> records;
    double wall_ms = 0.0;
};

struct ExperimentSummary {
    ExperimentConfig config;
    std::vector<RunResult> runs;
    double median_final = 0.0;
    double median_max = 0.0;
    /// Fraction of non-failed seeds whose final metric is at most c + 1
    /// (the envy guarantee target); meaningful for envy/lowerbound modes.
    double fraction_final_le_c1 = 0.0;
    long long total_acyclic_violations = 0;
    long long total_balance_violations = 0;
    long long total_clamp = 0;
    int failed_seeds = 0;
    double wall_ms = 0.0;

    std::string to_json_text() const;
};

/// Runs one experiment (one run per seed, fanned out over worker threads,
/// reduced in seed order). Writes trajectory.csv and summary.json under
/// config.out_dir when set.
ExperimentSummary run_experiment(const ExperimentConfig& config);

struct SweepRow {
    long long T = 0;
    double median_max = 0.0;
    double median_final = 0.0;
};

struct SweepResult {
    ExperimentConfig config;
    std::vector<SweepRow> rows;
    std::optional<ScalingFit> fit; // absent when fewer than 3 grid points
    std::string to_json_text() const;
};

/// Runs run_experiment once per grid value (ascending) and fits the log-log
/// growth of the median max metric. Writes sweep.csv and sweep.json under
/// config.out_dir when set.
SweepResult sweep(const ExperimentConfig& config, const std::vector<long long>& T_grid);

/// Runs the verify battery (config.probes, or the default battery when
/// empty). Writes probes.csv and probes.json under config.out_dir when set.
std::vector<ProbeReport> run_verify(const ExperimentConfig& config);

/// Default verify battery matching the documented probe parameters.
std::vector<ProbeConfig> default_probe_battery();

void write_probe_csv(const std::string& path, std::span<const ProbeReport> reports);

} // namespace odel
