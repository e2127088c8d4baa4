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

#include "loopdyn/experiments.h"

#include <gtest/gtest.h>

#include <sstream>

#include "loopdyn/oracle.h"

using namespace loopdyn;
using nlohmann::json;

namespace {

std::string render(const Report &r) {
    std::ostringstream out;
    out << r.json.dump(2);
    for (const auto &t : r.tables) {
        out << "\n# " << t.name << "\n";
        write_csv(out, t);
    }
    return out.str();
}

}  // namespace

TEST(experiments, config_defaults) {
    auto w = parse_wilson_scan({{"h_list", {0.01}}});
    EXPECT_EQ(w.L, 16);
    EXPECT_EQ(w.rectangles.size(), 21u);
    auto m = parse_membrane(json::object());
    EXPECT_EQ(m.l_list, (std::vector<int>{16, 20, 24, 32}));
    auto o = parse_oracle(json::object());
    EXPECT_EQ(o.lambda, 1.0);
    EXPECT_EQ(parse_memory({{"dim", 2}}).sector, (std::array<int, 3>{1, 0, 0}));
    // Echoed configs parse back to themselves.
    EXPECT_EQ(to_json(parse_relax(to_json(RelaxConfig{}))), to_json(RelaxConfig{}));
    EXPECT_EQ(to_json(parse_typeb(to_json(TypeBConfig{}))), to_json(TypeBConfig{}));
    EXPECT_EQ(to_json(parse_memory(to_json(MemoryConfig{}))), to_json(MemoryConfig{}));
    EXPECT_EQ(to_json(parse_oracle(to_json(OracleConfig{}))), to_json(OracleConfig{}));
    EXPECT_EQ(to_json(parse_membrane(to_json(m))), to_json(m));
    EXPECT_EQ(to_json(parse_wilson_scan(to_json(w))), to_json(w));
}

TEST(experiments, config_errors) {
    EXPECT_THROW(parse_relax({{"hh", 0.1}}), ConfigError);
    EXPECT_THROW(parse_relax({{"experiment", "memory"}}), ConfigError);
    EXPECT_THROW(parse_relax({{"h", "small"}}), ConfigError);
    EXPECT_THROW(parse_relax({{"h", -0.1}}), ConfigError);
    EXPECT_THROW(parse_relax({{"reference_trajectories", 1}}), ConfigError);
    EXPECT_THROW(parse_relax({{"initial", "hot"}}), std::invalid_argument);
    EXPECT_THROW(parse_relax(json::array()), ConfigError);
    EXPECT_THROW(parse_wilson_scan(json::object()), ConfigError);
    EXPECT_THROW(parse_wilson_scan({{"h_list", {0.02, 0.01}}}), ConfigError);
    EXPECT_THROW(parse_wilson_scan({{"h_list", {0.01}}, {"rectangles", {{1, 16}}}}), ConfigError);
    EXPECT_THROW(parse_membrane({{"R0", {8, 12}}, {"L", {16}}}), ConfigError);
    EXPECT_THROW(parse_membrane({{"R0", {8}}, {"L", {8}}}), ConfigError);
    EXPECT_THROW(parse_typeb({{"L", {7}}}), ConfigError);
    EXPECT_THROW(parse_oracle({{"L", 4}}), ConfigError);
    EXPECT_THROW(parse_oracle({{"lambda", 0}}), ConfigError);
    EXPECT_THROW(run_experiment("nope", json::object(), 1), ConfigError);
    EXPECT_THROW(run_experiment("memory", {{"dim", 4}}, 1), ConfigError);
    EXPECT_THROW(run_experiment("wilson_scan", {{"h_list", {0.1}}, {"L", 2}, {"max_extent", 1}}, 1), ConfigError);
    // Shared keys handled by the front end are accepted everywhere.
    EXPECT_NO_THROW(parse_typeb({{"workers", 3}, {"out", "x"}, {"experiment", "typeb_lifetime"}}));
}

TEST(experiments, wilson_without_noise_is_one) {
    auto c = parse_wilson_scan({{"L", 6}, {"h_list", {0.0, 0.05}}, {"max_extent", 3}, {"warmup_sweeps", 5},
                                {"measure_sweeps", 4}, {"trajectories", 2}});
    auto r = wilson_scan(c, 1);
    ASSERT_EQ(r.json["scan"][0]["bins"].size(), 6u);
    for (const auto &bin : r.json["scan"][0]["bins"]) {
        EXPECT_EQ(bin["wilson"], 1.0);
    }
    EXPECT_LT(r.json["scan"][1]["bins"][0]["wilson"].get<double>(), 1.0);
    ASSERT_EQ(r.tables.size(), 2u);
    EXPECT_EQ(r.tables[0].name, "wilson_h0");
    EXPECT_EQ(r.tables[1].name, "wilson_h0.05");
}

TEST(experiments, relax_without_noise_from_vacuum) {
    RelaxConfig c;
    c.L = 5;
    c.h = 0.0;
    c.initial = "all_up";
    c.trajectories = 3;
    c.reference_trajectories = 2;
    c.max_sweeps = 10;
    auto r = relax_density(c, 1);
    EXPECT_EQ(r.json["steady_density"]["mean"], 0.0);
    for (const auto &row : r.tables[0].rows) {
        EXPECT_EQ(row.mean, 0.0) << row.observable << " at " << row.time_sweeps;
    }
    EXPECT_EQ(r.json["decay"], "undetermined");
}

TEST(experiments, relax_from_random_start_decays) {
    RelaxConfig c;
    c.L = 6;
    c.h = 0.05;
    c.trajectories = 8;
    c.reference_trajectories = 4;
    c.max_sweeps = 30;
    auto r = relax_density(c, 2);
    const auto &rows = r.tables[0].rows;
    EXPECT_EQ(rows.front().observable, "defect_density");
    EXPECT_NEAR(rows.front().mean, 0.5, 0.05);
    double tail = r.json["random_start_tail_density"]["mean"].get<double>();
    double steady = r.json["steady_density"]["mean"].get<double>();
    EXPECT_LT(tail, 0.4);
    EXPECT_GT(steady, 0.0);
    EXPECT_LT(steady, tail);
}

TEST(experiments, smallest_membrane_vanishes_quickly) {
    MembraneConfig c;
    c.r0_list = {1, 2};
    c.l_list = {4, 6};
    c.trajectories = 200;
    auto r = membrane_shrink(c, 1);
    auto tau1 = r.json["per_R0"][0]["extinction_time_sweeps"]["mean"].get<double>();
    auto tau2 = r.json["per_R0"][1]["extinction_time_sweeps"]["mean"].get<double>();
    EXPECT_GT(tau1, 0.1);
    EXPECT_LT(tau1, 3.0);
    EXPECT_GT(tau2, tau1);
    EXPECT_EQ(r.json["per_R0"][0]["censored_fraction"], 0.0);
    // The P(t) table starts at the initial perimeter.
    EXPECT_EQ(r.tables[0].rows[0].mean, 4.0);
    EXPECT_EQ(r.tables[0].rows[1].mean, 16.0);
}

TEST(experiments, typeb_without_noise_never_decays) {
    TypeBConfig c;
    c.h = 0.0;
    c.l_list = {4, 6};
    c.trajectories = 3;
    c.max_sweeps = 50;
    auto r = typeb_lifetime(c, 1);
    for (const auto &e : r.json["per_L"]) {
        EXPECT_EQ(e["censored_fraction"], 1.0);
        EXPECT_EQ(e["initial_count_is_2"], true);
    }
    EXPECT_TRUE(r.json["alpha"].is_null());
    EXPECT_EQ(r.tables[0].rows.back().time_sweeps, 50);
    EXPECT_EQ(r.tables[0].rows.back().mean, 1.0);
}

TEST(experiments, memory_without_noise_is_kept) {
    MemoryConfig c;
    c.L = 5;
    c.h = 0.0;
    c.trajectories = 2;
    c.max_sweeps = 20;
    c.record_interval_sweeps = 5;
    auto r = memory(c, 1);
    EXPECT_EQ(r.json["n_lost"], 0);
    EXPECT_EQ(r.json["retained_fraction_final"], 1.0);
    EXPECT_EQ(r.json["confidence_min"], 1.0);
    EXPECT_EQ(r.json["retention_time_lower_bound_sweeps"], 20);
}

TEST(experiments, output_independent_of_workers) {
    std::vector<std::pair<std::string, json>> runs{
        {"wilson_scan", {{"L", 6}, {"h_list", {0.02, 0.1}}, {"max_extent", 3}, {"warmup_sweeps", 10},
                         {"measure_sweeps", 6}, {"trajectories", 5}}},
        {"relax_density", {{"L", 6}, {"trajectories", 9}, {"reference_trajectories", 3}, {"max_sweeps", 20}}},
        {"membrane_shrink", {{"R0", {2, 3}}, {"L", {6, 7}}, {"trajectories", 11}}},
        {"typeb_lifetime", {{"h", 0.05}, {"L", {4, 6}}, {"trajectories", 7}, {"max_sweeps", 200}}},
        {"memory", {{"L", 5}, {"h", 0.05}, {"trajectories", 6}, {"max_sweeps", 40}, {"record_interval_sweeps", 10}}},
    };
    for (const auto &[kind, cfg] : runs) {
        EXPECT_EQ(render(run_experiment(kind, cfg, 1)), render(run_experiment(kind, cfg, 8))) << kind;
    }
}

TEST(experiments, seed_changes_output) {
    json cfg{{"R0", {2}}, {"L", {6}}, {"trajectories", 5}};
    auto a = render(run_experiment("membrane_shrink", cfg, 1));
    cfg["seed"] = 2;
    EXPECT_NE(a, render(run_experiment("membrane_shrink", cfg, 1)));
}

TEST(experiments, oracle_report_small) {
    OracleConfig c;
    c.h_list = {0.2};
    c.mc_steps = 2000000;
    auto r = oracle_report(c);
    EXPECT_EQ(r.json["h0"]["degeneracy"], 4);
    EXPECT_EQ(r.json["per_h"][0]["degeneracy"], 1);
    EXPECT_EQ(r.json["perturbation"]["matrix"].size(), 4u);
    EXPECT_LT(r.json["monte_carlo"]["total_variation"].get<double>(), 0.1);
    c.residual_tol = 1e-30;
    EXPECT_THROW(oracle_report(c), oracle::NumericalError);
}

TEST(experiments, benchmark) {
    auto b = benchmark_kernel(3, 8, 0.01, 100000, 2, 1);
    EXPECT_EQ(b.steps, 100000u);
    EXPECT_GT(b.flips_per_second, 0.0);
}
