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

// Command-line front end: one subcommand per experiment plus a kernel benchmark.
//
//   loopdyn <command> [--config FILE] [--seed N] [--out DIR] [--workers N] [--record-wall-time]
//   loopdyn bench [--dim 3] [--L 32] [--noise 0.005] [--steps N] [--warmup-sweeps N] [--seed N]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 1 anything else.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "loopdyn/experiments.h"
#include "loopdyn/oracle.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunOptions {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::string out;
    std::optional<int> workers;
    bool record_wall_time = false;
};

nlohmann::json load_config(const std::string &path) {
    if (path.empty()) {
        return nlohmann::json::object();
    }
    std::ifstream f(path);
    if (!f) {
        throw loopdyn::ConfigError("cannot open config file '" + path + "'");
    }
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error &e) {
        throw loopdyn::ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

int run_command(const loopdyn::ExperimentKind &kind, const RunOptions &opt) {
    nlohmann::json config = load_config(opt.config_path);
    if (!config.is_object()) {
        throw loopdyn::ConfigError("config must be a JSON object");
    }
    if (opt.seed) {
        config["seed"] = *opt.seed;
    }
    std::optional<int> requested = opt.workers;
    if (!requested && config.contains("workers")) {
        if (!config["workers"].is_number_integer()) {
            throw loopdyn::ConfigError("config field 'workers' must be an integer");
        }
        requested = config["workers"].get<int>();
    }
    if (requested && *requested < 1) {
        throw loopdyn::ConfigError("workers must be >= 1");
    }
    int workers = requested ? *requested : loopdyn::default_workers();
    std::string out = opt.out;
    if (out.empty()) {
        out = config.contains("out") && config["out"].is_string() ? config["out"].get<std::string>()
                                                                  : std::string("loopdyn-") + kind.command;
    }

    auto t0 = std::chrono::steady_clock::now();
    loopdyn::Report report = loopdyn::run_experiment(kind.config_name, config, workers);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.record_wall_time) {
        report.json["wall_time_seconds"] = wall;
    }
    loopdyn::write_report(report, out);
    std::cerr << kind.command << ": " << wall << " s with " << workers << " worker(s)\n";
    std::cout << out << "/report.json\n";
    for (const auto &t : report.tables) {
        std::cout << out << "/" << t.name << ".csv\n";
    }
    return kExitOk;
}

int run_bench(int dim, int L, double h, double steps, int64_t warmup, uint64_t seed) {
    if (!(steps >= 1)) {
        throw loopdyn::ConfigError("--steps must be >= 1");
    }
    auto r = loopdyn::benchmark_kernel(dim, L, h, static_cast<uint64_t>(steps), warmup, seed);
    nlohmann::json j = {{"dim", dim},
                        {"L", L},
                        {"h", h},
                        {"steps", r.steps},
                        {"seconds", r.seconds},
                        {"flips_per_second", r.flips_per_second},
                        {"final_defects", r.final_defects}};
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Constrained-Glauber loop dynamics: Monte Carlo experiments and exact checks"};
    app.require_subcommand(1);

    RunOptions opt;
    std::vector<std::pair<const loopdyn::ExperimentKind *, CLI::App *>> commands;
    for (const auto &kind : loopdyn::kExperiments) {
        CLI::App *sub = app.add_subcommand(kind.command, std::string("run the ") + kind.config_name + " experiment");
        sub->add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--workers", opt.workers, std::string("worker threads (default $") + loopdyn::kWorkersEnv +
                                                      " or hardware concurrency)");
        sub->add_flag("--record-wall-time", opt.record_wall_time,
                      "add wall_time_seconds to report.json (breaks byte-identical reruns)");
        commands.push_back({&kind, sub});
    }

    int b_dim = 3, b_L = 32;
    double b_h = 0.005, b_steps = 2e8;
    int64_t b_warmup = 100;
    uint64_t b_seed = 1;
    CLI::App *bench = app.add_subcommand("bench", "single-threaded kernel throughput");
    bench->add_option("--dim", b_dim, "lattice dimension");
    bench->add_option("--L", b_L, "linear size");
    bench->add_option("--noise", b_h, "noise strength h");
    bench->add_option("--steps", b_steps, "timed attempted flips");
    bench->add_option("--warmup-sweeps", b_warmup, "untimed sweeps before timing");
    bench->add_option("--seed", b_seed, "seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (bench->parsed()) {
            return run_bench(b_dim, b_L, b_h, b_steps, b_warmup, b_seed);
        }
        for (auto [kind, sub] : commands) {
            if (sub->parsed()) {
                return run_command(*kind, opt);
            }
        }
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const loopdyn::oracle::NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::logic_error &e) {
        std::cerr << "numerical failure (invariant violated): " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOther;
    }
    return kExitOther;
}
