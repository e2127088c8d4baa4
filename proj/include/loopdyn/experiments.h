// Copyright 2026 The loopdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOOPDYN_EXPERIMENTS_H
#define LOOPDYN_EXPERIMENTS_H

#include <array>
#include <cstdint>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "loopdyn/report.h"

namespace loopdyn {

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Wilson loops in the steady state for a list of h.
struct WilsonScanConfig {
    int dim = 3;
    int L = 16;
    std::vector<double> h_list;
    /// Rectangles (a, b); default all 1 <= a <= b <= max_extent.
    std::vector<std::pair<int, int>> rectangles;
    int max_extent = 6;
    int64_t warmup_sweeps = 1000;
    int64_t measure_sweeps = 400;
    int64_t measure_interval_sweeps = 2;
    int64_t trajectories = 8;
    uint64_t seed = 1;
    std::string initial = "all_up";
    /// A bin enters the log fits only if mean(W) >= min_signal * stderr(W).
    double min_signal = 3.0;
    /// Smallest square side used by the through-origin perimeter slope.
    int slope_min_square = 2;
};

/// Defect-density relaxation from random starts.
struct RelaxConfig {
    int dim = 3;
    int L = 16;
    double h = 0.05;
    int64_t trajectories = 64;
    std::string initial = "random";
    int64_t max_sweeps = 2000;
    /// Stamps: every sweep up to linear_until, then per_decade log-spaced stamps up to max_sweeps.
    int64_t linear_until = 32;
    int per_decade = 16;
    /// Steady density from cold (all_up) companion trajectories, averaged over the last
    /// tail_fraction of the schedule.
    int64_t reference_trajectories = 16;
    double tail_fraction = 0.5;
    /// Fit window: t >= fit_t_min up to the first stamp where Delta D < fit_sigma * sigma.
    int64_t fit_t_min = 2;
    double fit_sigma = 3.0;
    uint64_t seed = 1;
};

/// Shrinking of an R0 x R0 membrane boundary at h = 0.
struct MembraneConfig {
    double h = 0.0;
    std::vector<int> r0_list{8, 12, 16, 24};
    /// Lattice sizes per R0; default R0 + l_margin.
    std::vector<int> l_list;
    int l_margin = 8;
    int64_t trajectories = 1000;
    int64_t max_sweeps = 100000;
    /// Linear fit of mean P^2(t) over [window_lo, window_hi] * mean extinction time.
    double window_lo = 0.1;
    double window_hi = 0.5;
    uint64_t seed = 1;
};

/// Lifetime of the two straight non-contractible loops of the half-plane membrane.
struct TypeBConfig {
    double h = 0.005;
    std::vector<int> l_list{6, 8, 10, 12};
    int64_t trajectories = 200;
    int64_t max_sweeps = 50000;
    /// Non-contractible loops are counted every num_links / checks_per_sweep steps.
    int checks_per_sweep = 16;
    /// Survival fraction is written to CSV every record_interval_sweeps.
    int64_t record_interval_sweeps = 10;
    uint64_t seed = 1;
};

/// Retention of a topological sector.
struct MemoryConfig {
    int dim = 3;
    int L = 12;
    double h = 0.005;
    std::array<int, 3> sector{1, 0, 1};
    int64_t trajectories = 16;
    int64_t max_sweeps = 10000;
    int64_t record_interval_sweeps = 100;
    uint64_t seed = 1;
};

/// Exact generator analysis on the 2d L = 3 torus.
struct OracleConfig {
    int L = 3;
    double lambda = 1.0;
    std::vector<double> h_list{0.05, 0.1, 0.25};
    /// h of the perturbation used for the first-order effective generator.
    double pt_h = 0.1;
    double null_tol = 1e-10;
    double residual_tol = 1e-9;
    /// Optional Monte Carlo comparison at mc_h with mc_steps kernel steps (0 = skip).
    double mc_h = 0.1;
    int64_t mc_steps = 0;
    uint64_t seed = 1;
};

WilsonScanConfig parse_wilson_scan(const nlohmann::json &j);
RelaxConfig parse_relax(const nlohmann::json &j);
MembraneConfig parse_membrane(const nlohmann::json &j);
TypeBConfig parse_typeb(const nlohmann::json &j);
MemoryConfig parse_memory(const nlohmann::json &j);
OracleConfig parse_oracle(const nlohmann::json &j);

nlohmann::json to_json(const WilsonScanConfig &c);
nlohmann::json to_json(const RelaxConfig &c);
nlohmann::json to_json(const MembraneConfig &c);
nlohmann::json to_json(const TypeBConfig &c);
nlohmann::json to_json(const MemoryConfig &c);
nlohmann::json to_json(const OracleConfig &c);

/// Each run validates its config as the parser does (ConfigError on invalid fields) and fills
/// list defaults left empty.
Report wilson_scan(const WilsonScanConfig &config, int workers);
Report relax_density(const RelaxConfig &config, int workers);
Report membrane_shrink(const MembraneConfig &config, int workers);
Report typeb_lifetime(const TypeBConfig &config, int workers);
Report memory(const MemoryConfig &config, int workers);
Report oracle_report(const OracleConfig &config);

/// Experiment kinds accepted in the "experiment" field and their CLI subcommand names.
struct ExperimentKind {
    const char *config_name;
    const char *command;
};
inline constexpr std::array<ExperimentKind, 6> kExperiments{{
    {"wilson_scan", "wilson-scan"},
    {"relax_density", "relax"},
    {"membrane_shrink", "membrane"},
    {"typeb_lifetime", "lifetime"},
    {"memory", "memory"},
    {"oracle", "oracle"},
}};

/// Parses `config` for experiment `kind` (config name) and runs it. Throws ConfigError on any
/// invalid field, including unknown keys and an "experiment" field naming a different kind.
Report run_experiment(const std::string &kind, const nlohmann::json &config, int workers);

/// Empirical distribution over gauge orbits of a 2d L = 3 chain run for `steps` kernel steps from
/// all_up, sampled after every step.
std::vector<double> mc_orbit_histogram(double h, int64_t steps, uint64_t seed);

/// Attempted flips per second of one kernel on a dim-d lattice after `warmup_sweeps`.
struct BenchResult {
    double flips_per_second = 0.0;
    double seconds = 0.0;
    uint64_t steps = 0;
    int64_t final_defects = 0;
};
BenchResult benchmark_kernel(int dim, int L, double h, uint64_t steps, int64_t warmup_sweeps, uint64_t seed);

}  // namespace loopdyn

#endif
