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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "loopdyn/observables.h"
#include "loopdyn/oracle.h"

namespace loopdyn {

using nlohmann::json;

namespace {

// Reads typed fields from a config object and rejects keys nobody asked for.
class Fields {
   public:
    Fields(const json &j, const char *kind) : j_(j), kind_(kind) {
        if (!j.is_object()) {
            throw ConfigError("config must be a JSON object");
        }
        if (j.contains("experiment")) {
            if (!j["experiment"].is_string() || j["experiment"].get<std::string>() != kind) {
                throw ConfigError(std::string("config names experiment ") + j["experiment"].dump() + ", expected \"" +
                                  kind + "\"");
            }
        }
    }

    template <typename T>
    void get(const char *key, T &dst) {
        used_.insert(key);
        if (!j_.contains(key)) {
            return;
        }
        try {
            dst = j_.at(key).get<T>();
        } catch (const json::exception &e) {
            throw ConfigError(std::string("config field '") + key + "': " + e.what());
        }
    }

    void finish() const {
        for (const auto &item : j_.items()) {
            if (!used_.count(item.key())) {
                throw ConfigError("unknown config field '" + item.key() + "' for " + kind_);
            }
        }
    }

   private:
    const json &j_;
    std::string kind_;
    std::set<std::string> used_{"experiment", "out", "workers"};
};

void require(bool ok, const std::string &message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

void require_h(double h) { require(std::isfinite(h) && h >= 0, "h must be finite and >= 0"); }

std::shared_ptr<const LatticeGeometry> geometry(int dim, int L) {
    try {
        return build_geometry(dim, L);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
}

std::string h_label(double h) { return format_double(h); }

}  // namespace

// ---------------------------------------------------------------------------------------------
// Config parsing.

WilsonScanConfig parse_wilson_scan(const json &j) {
    WilsonScanConfig c;
    Fields f(j, "wilson_scan");
    f.get("dim", c.dim);
    f.get("L", c.L);
    f.get("h_list", c.h_list);
    f.get("rectangles", c.rectangles);
    f.get("max_extent", c.max_extent);
    f.get("warmup_sweeps", c.warmup_sweeps);
    f.get("measure_sweeps", c.measure_sweeps);
    f.get("measure_interval_sweeps", c.measure_interval_sweeps);
    f.get("trajectories", c.trajectories);
    f.get("seed", c.seed);
    f.get("initial", c.initial);
    f.get("min_signal", c.min_signal);
    f.get("slope_min_square", c.slope_min_square);
    f.finish();
    require(!c.h_list.empty(), "wilson_scan: h_list must not be empty");
    for (size_t k = 0; k < c.h_list.size(); k++) {
        require_h(c.h_list[k]);
        require(k == 0 || c.h_list[k] > c.h_list[k - 1], "wilson_scan: h_list must be strictly increasing");
    }
    require(c.dim == 2 || c.dim == 3, "wilson_scan: dim must be 2 or 3");
    if (c.rectangles.empty()) {
        require(c.max_extent >= 1 && c.max_extent < c.L, "wilson_scan: need 1 <= max_extent < L");
        for (int a = 1; a <= c.max_extent; a++) {
            for (int b = a; b <= c.max_extent; b++) {
                c.rectangles.push_back({a, b});
            }
        }
    }
    for (auto [a, b] : c.rectangles) {
        require(a >= 1 && b >= 1 && a < c.L && b < c.L, "wilson_scan: rectangle sides must lie in [1, L)");
    }
    require(c.warmup_sweeps >= 0 && c.measure_sweeps >= 0, "wilson_scan: sweep counts must be >= 0");
    require(c.measure_interval_sweeps >= 1, "wilson_scan: measure_interval_sweeps must be >= 1");
    require(c.trajectories >= 2, "wilson_scan: need at least 2 trajectories for error bars");
    require(c.initial == "all_up" || c.initial == "random", "wilson_scan: initial must be all_up or random");
    require(c.min_signal >= 0, "wilson_scan: min_signal must be >= 0");
    return c;
}

RelaxConfig parse_relax(const json &j) {
    RelaxConfig c;
    Fields f(j, "relax_density");
    f.get("dim", c.dim);
    f.get("L", c.L);
    f.get("h", c.h);
    f.get("trajectories", c.trajectories);
    f.get("initial", c.initial);
    f.get("max_sweeps", c.max_sweeps);
    f.get("linear_until", c.linear_until);
    f.get("per_decade", c.per_decade);
    f.get("reference_trajectories", c.reference_trajectories);
    f.get("tail_fraction", c.tail_fraction);
    f.get("fit_t_min", c.fit_t_min);
    f.get("fit_sigma", c.fit_sigma);
    f.get("seed", c.seed);
    f.finish();
    require_h(c.h);
    require(c.dim == 2 || c.dim == 3, "relax_density: dim must be 2 or 3");
    require(c.trajectories >= 2, "relax_density: need at least 2 trajectories");
    require(c.reference_trajectories >= 2, "relax_density: insufficient reference trajectories for tail estimation");
    require(c.max_sweeps >= 1 && c.linear_until >= 0 && c.per_decade >= 1, "relax_density: invalid time grid");
    require(c.tail_fraction > 0 && c.tail_fraction <= 1, "relax_density: tail_fraction must lie in (0, 1]");
    require(c.fit_t_min >= 0 && c.fit_sigma > 0, "relax_density: invalid fit window");
    initial_kind_from_string(c.initial);
    return c;
}

MembraneConfig parse_membrane(const json &j) {
    MembraneConfig c;
    Fields f(j, "membrane_shrink");
    f.get("h", c.h);
    f.get("R0", c.r0_list);
    f.get("L", c.l_list);
    f.get("L_margin", c.l_margin);
    f.get("trajectories", c.trajectories);
    f.get("max_sweeps", c.max_sweeps);
    f.get("window_lo", c.window_lo);
    f.get("window_hi", c.window_hi);
    f.get("seed", c.seed);
    f.finish();
    require_h(c.h);
    require(!c.r0_list.empty(), "membrane_shrink: R0 list must not be empty");
    if (c.l_list.empty()) {
        for (int r0 : c.r0_list) {
            c.l_list.push_back(r0 + c.l_margin);
        }
    }
    require(c.l_list.size() == c.r0_list.size(), "membrane_shrink: L list must match the R0 list");
    for (size_t k = 0; k < c.r0_list.size(); k++) {
        require(c.r0_list[k] >= 1 && c.r0_list[k] < c.l_list[k], "membrane_shrink: need 1 <= R0 < L");
    }
    require(c.trajectories >= 2, "membrane_shrink: need at least 2 trajectories");
    require(c.max_sweeps >= 1, "membrane_shrink: max_sweeps must be >= 1");
    require(0 <= c.window_lo && c.window_lo < c.window_hi, "membrane_shrink: need 0 <= window_lo < window_hi");
    return c;
}

TypeBConfig parse_typeb(const json &j) {
    TypeBConfig c;
    Fields f(j, "typeb_lifetime");
    f.get("h", c.h);
    f.get("L", c.l_list);
    f.get("trajectories", c.trajectories);
    f.get("max_sweeps", c.max_sweeps);
    f.get("checks_per_sweep", c.checks_per_sweep);
    f.get("record_interval_sweeps", c.record_interval_sweeps);
    f.get("seed", c.seed);
    f.finish();
    require_h(c.h);
    require(!c.l_list.empty(), "typeb_lifetime: L list must not be empty");
    for (int L : c.l_list) {
        require(L >= 4 && L % 2 == 0, "typeb_lifetime: every L must be even and >= 4");
    }
    require(c.trajectories >= 2, "typeb_lifetime: need at least 2 trajectories");
    require(c.max_sweeps >= 1 && c.checks_per_sweep >= 1 && c.record_interval_sweeps >= 1,
            "typeb_lifetime: invalid schedule");
    return c;
}

MemoryConfig parse_memory(const json &j) {
    MemoryConfig c;
    Fields f(j, "memory");
    f.get("dim", c.dim);
    f.get("L", c.L);
    f.get("h", c.h);
    f.get("sector", c.sector);
    f.get("trajectories", c.trajectories);
    f.get("max_sweeps", c.max_sweeps);
    f.get("record_interval_sweeps", c.record_interval_sweeps);
    f.get("seed", c.seed);
    f.finish();
    require_h(c.h);
    require(c.dim == 2 || c.dim == 3, "memory: dim must be 2 or 3");
    if (c.dim == 2 && !j.contains("sector")) {
        c.sector[2] = 0;
    }
    require(c.trajectories >= 1, "memory: need at least 1 trajectory");
    require(c.max_sweeps >= 0 && c.record_interval_sweeps >= 1, "memory: invalid schedule");
    return c;
}

OracleConfig parse_oracle(const json &j) {
    OracleConfig c;
    Fields f(j, "oracle");
    f.get("L", c.L);
    f.get("lambda", c.lambda);
    f.get("h_list", c.h_list);
    f.get("pt_h", c.pt_h);
    f.get("null_tol", c.null_tol);
    f.get("residual_tol", c.residual_tol);
    f.get("mc_h", c.mc_h);
    f.get("mc_steps", c.mc_steps);
    f.get("seed", c.seed);
    f.finish();
    require(c.L == 3, "oracle: only L = 3 is supported (2^18 states)");
    require(c.lambda > 0, "oracle: lambda must be > 0");
    for (double h : c.h_list) {
        require(std::isfinite(h) && h > 0, "oracle: h_list entries must be > 0");
    }
    require_h(c.pt_h);
    require(c.mc_h > 0, "oracle: mc_h must be > 0");
    require(c.mc_steps >= 0, "oracle: mc_steps must be >= 0");
    require(c.null_tol > 0 && c.residual_tol > 0, "oracle: tolerances must be > 0");
    return c;
}

json to_json(const WilsonScanConfig &c) {
    return {{"experiment", "wilson_scan"},
            {"dim", c.dim},
            {"L", c.L},
            {"h_list", c.h_list},
            {"rectangles", c.rectangles},
            {"max_extent", c.max_extent},
            {"warmup_sweeps", c.warmup_sweeps},
            {"measure_sweeps", c.measure_sweeps},
            {"measure_interval_sweeps", c.measure_interval_sweeps},
            {"trajectories", c.trajectories},
            {"seed", c.seed},
            {"initial", c.initial},
            {"min_signal", c.min_signal},
            {"slope_min_square", c.slope_min_square}};
}

json to_json(const RelaxConfig &c) {
    return {{"experiment", "relax_density"},
            {"dim", c.dim},
            {"L", c.L},
            {"h", c.h},
            {"trajectories", c.trajectories},
            {"initial", c.initial},
            {"max_sweeps", c.max_sweeps},
            {"linear_until", c.linear_until},
            {"per_decade", c.per_decade},
            {"reference_trajectories", c.reference_trajectories},
            {"tail_fraction", c.tail_fraction},
            {"fit_t_min", c.fit_t_min},
            {"fit_sigma", c.fit_sigma},
            {"seed", c.seed}};
}

json to_json(const MembraneConfig &c) {
    return {{"experiment", "membrane_shrink"},
            {"h", c.h},
            {"R0", c.r0_list},
            {"L", c.l_list},
            {"L_margin", c.l_margin},
            {"trajectories", c.trajectories},
            {"max_sweeps", c.max_sweeps},
            {"window_lo", c.window_lo},
            {"window_hi", c.window_hi},
            {"seed", c.seed}};
}

json to_json(const TypeBConfig &c) {
    return {{"experiment", "typeb_lifetime"},
            {"h", c.h},
            {"L", c.l_list},
            {"trajectories", c.trajectories},
            {"max_sweeps", c.max_sweeps},
            {"checks_per_sweep", c.checks_per_sweep},
            {"record_interval_sweeps", c.record_interval_sweeps},
            {"seed", c.seed}};
}

json to_json(const MemoryConfig &c) {
    return {{"experiment", "memory"},
            {"dim", c.dim},
            {"L", c.L},
            {"h", c.h},
            {"sector", c.sector},
            {"trajectories", c.trajectories},
            {"max_sweeps", c.max_sweeps},
            {"record_interval_sweeps", c.record_interval_sweeps},
            {"seed", c.seed}};
}

json to_json(const OracleConfig &c) {
    return {{"experiment", "oracle"}, {"L", c.L},
            {"lambda", c.lambda},     {"h_list", c.h_list},
            {"pt_h", c.pt_h},         {"null_tol", c.null_tol},
            {"residual_tol", c.residual_tol}, {"mc_h", c.mc_h},
            {"mc_steps", c.mc_steps}, {"seed", c.seed}};
}

namespace {

json header(const json &config) { return {{"config", config}, {"code_version", kCodeVersion}}; }

std::optional<LinearFit> try_fit(const std::vector<double> &x, const std::vector<double> &y, bool intercept) {
    try {
        return fit_linear(x, y, intercept);
    } catch (const std::invalid_argument &) {
        return std::nullopt;
    }
}

json fit_or_null(const std::optional<LinearFit> &fit) { return fit ? to_json(*fit) : json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------------------------
// wilson_scan

Report wilson_scan(const WilsonScanConfig &input, int workers) {
    // Resolves defaults and validates fields exactly as a parsed config would be.
    const WilsonScanConfig config = parse_wilson_scan(to_json(input));
    auto geom = geometry(config.dim, config.L);
    std::vector<WilsonSpec> specs;
    for (auto [a, b] : config.rectangles) {
        specs.push_back({a, b, {}, true});
    }
    const int64_t n_traj = config.trajectories;
    const int64_t n_rect = static_cast<int64_t>(specs.size());
    InitialStateSpec init{initial_kind_from_string(config.initial)};

    Report report;
    report.json = header(to_json(config));
    json scan = json::array();
    std::vector<std::string> decisions;

    for (size_t hi = 0; hi < config.h_list.size(); hi++) {
        const double h = config.h_list[hi];
        FlipKernel kernel(*geom, h);
        // Per-trajectory time average of the translation/plane average of each rectangle.
        auto per_traj = run_indexed(n_traj, workers, [&](int64_t i) {
            Rng rng = Rng::for_stream(config.seed, static_cast<uint64_t>(hi * n_traj + i));
            SpinState state = make_initial(geom, init, rng);
            WilsonSampler sampler(*geom, specs);
            kernel.run_sweeps(state, rng, config.warmup_sweeps);
            std::vector<double> acc(n_rect, 0.0);
            int64_t n_samples = 0;
            for (int64_t t = 0; t <= config.measure_sweeps; t += config.measure_interval_sweeps) {
                if (t > 0) {
                    kernel.run_sweeps(state, rng, config.measure_interval_sweeps);
                }
                auto w = sampler.measure(state);
                for (int64_t k = 0; k < n_rect; k++) {
                    acc[k] += w[k];
                }
                n_samples++;
            }
            for (auto &v : acc) {
                v /= n_samples;
            }
            return acc;
        });

        CsvTable table;
        table.name = "wilson_h" + h_label(h);
        const int64_t stamp = config.warmup_sweeps + config.measure_sweeps;
        json bins = json::array();
        std::vector<double> per_x, area_x, y, sq_x, sq_y;
        for (int64_t k = 0; k < n_rect; k++) {
            std::vector<double> col(n_traj);
            for (int64_t i = 0; i < n_traj; i++) {
                col[i] = per_traj[i][k];
            }
            MeanError w = mean_and_error(col);
            const int a = specs[k].a, b = specs[k].b;
            const int perimeter = 2 * (a + b), area = a * b;
            bool usable = w.mean > 0 && w.mean >= config.min_signal * w.error;
            json bin = {{"a", a},           {"b", b},          {"perimeter", perimeter},
                        {"area", area},     {"wilson", w.mean}, {"wilson_stderr", w.error},
                        {"included", usable}};
            std::string name = "wilson_" + std::to_string(a) + "x" + std::to_string(b);
            table.rows.push_back({stamp, name, w.mean, w.error, n_traj});
            bool positive_leaves = true;
            double total = 0.0;
            for (double v : col) {
                total += v;
            }
            for (double v : col) {
                positive_leaves &= (total - v) > 0;
            }
            if (usable && positive_leaves) {
                MeanError nl = jackknife(col, [](double m) { return -std::log(m); });
                bin["neg_log_wilson"] = nl.mean;
                bin["neg_log_wilson_stderr"] = nl.error;
                table.rows.push_back({stamp, "neg_log_" + name, nl.mean, nl.error, n_traj});
                per_x.push_back(perimeter);
                area_x.push_back(area);
                y.push_back(nl.mean);
                if (a == b && a >= config.slope_min_square) {
                    sq_x.push_back(perimeter);
                    sq_y.push_back(nl.mean);
                }
            } else {
                bin["included"] = false;
                bin["flag"] = "consistent with zero; excluded from log fits";
            }
            bins.push_back(bin);
        }
        auto perimeter_fit = try_fit(per_x, y, true);
        auto area_fit = try_fit(area_x, y, true);
        auto square_slope = try_fit(sq_x, sq_y, false);
        std::string decision = "undetermined";
        if (perimeter_fit && area_fit) {
            decision = area_fit->rms_residual < perimeter_fit->rms_residual ? "area" : "perimeter";
        }
        decisions.push_back(decision);
        json entry = {{"h", h},
                      {"bins", bins},
                      {"n_included", static_cast<int64_t>(y.size())},
                      {"perimeter_fit", fit_or_null(perimeter_fit)},
                      {"area_fit", fit_or_null(area_fit)},
                      {"square_perimeter_slope", fit_or_null(square_slope)},
                      {"square_slope_over_2h", square_slope && h > 0 ? json(square_slope->slope / (2 * h)) : json(nullptr)},
                      {"preferred_law", decision}};
        scan.push_back(entry);
        report.tables.push_back(std::move(table));
    }

    // Crossover: the first h preferring the area law, bracketed by the grid point before it.
    json crossover = {{"lower", nullptr}, {"upper", nullptr}, {"monotone", true}};
    int first_area = -1;
    for (size_t k = 0; k < decisions.size(); k++) {
        if (decisions[k] == "area") {
            first_area = static_cast<int>(k);
            break;
        }
    }
    if (first_area >= 0) {
        crossover["upper"] = config.h_list[first_area];
        if (first_area > 0 && decisions[first_area - 1] == "perimeter") {
            crossover["lower"] = config.h_list[first_area - 1];
        }
    }
    bool monotone = true;
    for (size_t k = 0; k < decisions.size(); k++) {
        bool after = first_area >= 0 && static_cast<int>(k) >= first_area;
        monotone &= decisions[k] == (after ? "area" : "perimeter");
    }
    crossover["monotone"] = monotone;
    report.json["scan"] = scan;
    report.json["crossover"] = crossover;
    return report;
}

// ---------------------------------------------------------------------------------------------
// relax_density

namespace {

std::vector<int64_t> relax_times(const RelaxConfig &c) {
    std::set<int64_t> times;
    for (int64_t t = 0; t <= std::min(c.linear_until, c.max_sweeps); t++) {
        times.insert(t);
    }
    const double step = 1.0 / c.per_decade;
    for (double e = 0.0; std::pow(10.0, e) <= static_cast<double>(c.max_sweeps) * (1 + 1e-12); e += step) {
        times.insert(std::min<int64_t>(c.max_sweeps, std::llround(std::pow(10.0, e))));
    }
    times.insert(c.max_sweeps);
    return {times.begin(), times.end()};
}

}  // namespace

Report relax_density(const RelaxConfig &input, int workers) {
    const RelaxConfig config = parse_relax(to_json(input));
    auto geom = geometry(config.dim, config.L);
    SimParams params;
    params.h = config.h;
    params.seed = config.seed;
    params.n_trajectories = config.trajectories;
    ObservableSpec spec{{Observable::defect_density}, relax_times(config)};
    InitialStateSpec init{initial_kind_from_string(config.initial)};
    InitialStateSpec cold{InitialKind::all_up};
    validate_run(*geom, params, init, spec);

    auto main_samples = run_indexed(config.trajectories, workers,
                                    [&](int64_t i) { return run_trajectory(geom, params, init, spec, i); });
    auto ref_samples = run_indexed(config.reference_trajectories, workers, [&](int64_t i) {
        return run_trajectory(geom, params, cold, spec, config.trajectories + i);
    });
    TimeSeries ts = aggregate(main_samples, spec.times, spec, geom->num_links(), config.h);
    TimeSeries ref = aggregate(ref_samples, spec.times, spec, geom->num_links(), config.h);

    const int64_t tail_start = config.max_sweeps - static_cast<int64_t>(std::floor(config.tail_fraction * config.max_sweeps));
    auto tail_average = [&](const std::vector<TrajectorySamples> &samples) {
        std::vector<double> per_traj;
        for (const auto &s : samples) {
            double sum = 0.0;
            int n = 0;
            for (size_t t = 0; t < spec.times.size(); t++) {
                if (spec.times[t] >= tail_start) {
                    sum += s.values[t][0];
                    n++;
                }
            }
            per_traj.push_back(sum / n);
        }
        return mean_and_error(per_traj);
    };
    MeanError steady = tail_average(ref_samples);
    MeanError main_tail = tail_average(main_samples);

    const SeriesStats &d = ts.get("defect_density");
    SeriesStats delta{"delta_defect_density", {}, {}};
    std::vector<double> xs_lin, xs_log, ys;
    int64_t window_end = -1;
    bool window_open = true;
    for (size_t t = 0; t < ts.time_sweeps.size(); t++) {
        double dd = d.mean[t] - steady.mean;
        double sigma = std::hypot(d.error[t], steady.error);
        delta.mean.push_back(dd);
        delta.error.push_back(sigma);
        if (ts.time_sweeps[t] < config.fit_t_min || !window_open) {
            continue;
        }
        if (!(dd > config.fit_sigma * sigma) || !(dd > 0)) {
            window_open = false;
            window_end = ts.time_sweeps[t];
            continue;
        }
        xs_lin.push_back(static_cast<double>(ts.time_sweeps[t]));
        xs_log.push_back(std::log(static_cast<double>(ts.time_sweeps[t])));
        ys.push_back(std::log(dd));
    }
    ts.series.push_back(delta);

    auto semilog = try_fit(xs_lin, ys, true);
    auto loglog = try_fit(xs_log, ys, true);
    std::string verdict = "undetermined";
    if (semilog && loglog) {
        verdict = semilog->r_squared > loglog->r_squared ? "exponential" : "algebraic";
    }

    Report report;
    report.json = header(to_json(config));
    report.json["steady_density"] = to_json(steady);
    report.json["steady_density_source"] = "cold-start companion trajectories, tail average";
    report.json["random_start_tail_density"] = to_json(main_tail);
    report.json["tail_start_sweeps"] = tail_start;
    report.json["fit_window"] = {{"t_min", config.fit_t_min},
                                 {"t_first_unresolved", window_end >= 0 ? json(window_end) : json(nullptr)},
                                 {"n_points", static_cast<int64_t>(ys.size())},
                                 {"t_max_fitted", xs_lin.empty() ? json(nullptr) : json(xs_lin.back())}};
    report.json["semilog_fit"] = fit_or_null(semilog);
    report.json["loglog_fit"] = fit_or_null(loglog);
    report.json["decay"] = verdict;
    if (semilog) {
        report.json["relaxation_time_sweeps"] = semilog->slope < 0 ? json(-1.0 / semilog->slope) : json(nullptr);
    }
    if (loglog) {
        report.json["algebraic_exponent"] = -loglog->slope;
    }
    CsvTable table;
    table.name = "relax_h" + h_label(config.h);
    table.append(ts);
    CsvTable ref_table;
    ref_table.name = "relax_reference_h" + h_label(config.h);
    ref_table.append(ref);
    report.tables.push_back(std::move(table));
    report.tables.push_back(std::move(ref_table));
    return report;
}

// ---------------------------------------------------------------------------------------------
// membrane_shrink

namespace {

struct MembraneTrajectory {
    std::vector<double> loop_length;  // at t = 0, 1, 2, ... sweeps while defects remain
    bool extinct = false;
    double extinction_sweeps = 0.0;
};

}  // namespace

Report membrane_shrink(const MembraneConfig &input, int workers) {
    const MembraneConfig config = parse_membrane(to_json(input));
    Report report;
    report.json = header(to_json(config));
    json per_r0 = json::array();
    std::vector<double> log_r0, log_tau, slopes;
    bool any_censored_all = false;

    for (size_t k = 0; k < config.r0_list.size(); k++) {
        const int r0 = config.r0_list[k];
        auto geom = geometry(3, config.l_list[k]);
        InitialStateSpec init{InitialKind::square_membrane, r0};
        init.validate(*geom);
        FlipKernel kernel(*geom, config.h);
        const uint32_t n_links = geom->num_links();
        auto trajs = run_indexed(config.trajectories, workers, [&](int64_t i) {
            Rng rng = Rng::for_stream(config.seed, static_cast<uint64_t>(k * config.trajectories + i));
            SpinState state = make_initial(geom, init, rng);
            MembraneTrajectory out;
            out.loop_length.push_back(static_cast<double>(state.defect_count()));
            for (int64_t s = 0; s < config.max_sweeps; s++) {
                uint64_t steps = kernel.run_steps_until_defect_free(state, rng, n_links);
                if (state.defect_count() == 0) {
                    out.extinct = true;
                    out.extinction_sweeps = static_cast<double>(s) + static_cast<double>(steps) / n_links;
                    break;
                }
                out.loop_length.push_back(static_cast<double>(state.defect_count()));
            }
            return out;
        });

        size_t horizon = 0;
        std::vector<double> tau_samples;
        for (const auto &t : trajs) {
            horizon = std::max(horizon, t.loop_length.size());
            if (t.extinct) {
                tau_samples.push_back(t.extinction_sweeps);
            }
        }
        const int64_t n = config.trajectories;
        TimeSeries ts;
        ts.n_trajectories = n;
        SeriesStats p_series{"loop_length", {}, {}}, p2_series{"loop_length_squared", {}, {}};
        std::vector<double> col_p(n), col_p2(n);
        for (size_t t = 0; t <= horizon; t++) {
            for (int64_t i = 0; i < n; i++) {
                double p = t < trajs[i].loop_length.size() ? trajs[i].loop_length[t] : 0.0;
                col_p[i] = p;
                col_p2[i] = p * p;
            }
            ts.time_sweeps.push_back(static_cast<int64_t>(t));
            ts.physical_time.push_back(physical_time(t * n_links, n_links, config.h));
            MeanError mp = mean_and_error(col_p), mp2 = mean_and_error(col_p2);
            p_series.mean.push_back(mp.mean);
            p_series.error.push_back(mp.error);
            p2_series.mean.push_back(mp2.mean);
            p2_series.error.push_back(mp2.error);
        }
        ts.series = {p_series, p2_series};

        MeanError tau = mean_and_error(tau_samples);
        double censored = 1.0 - static_cast<double>(tau_samples.size()) / n;
        json entry = {{"R0", r0},
                      {"L", config.l_list[k]},
                      {"initial_loop_length", 4 * r0},
                      {"n_extinct", static_cast<int64_t>(tau_samples.size())},
                      {"censored_fraction", censored},
                      {"extinction_time_sweeps", to_json(tau)}};
        if (tau_samples.empty()) {
            any_censored_all = true;
            entry["p2_fit"] = nullptr;
        } else {
            std::vector<double> xs, ys;
            for (size_t t = 0; t < ts.time_sweeps.size(); t++) {
                double tt = static_cast<double>(ts.time_sweeps[t]);
                if (tt >= config.window_lo * tau.mean && tt <= config.window_hi * tau.mean) {
                    xs.push_back(tt);
                    ys.push_back(p2_series.mean[t]);
                }
            }
            auto fit = try_fit(xs, ys, true);
            entry["p2_window_sweeps"] = {config.window_lo * tau.mean, config.window_hi * tau.mean};
            entry["p2_fit"] = fit_or_null(fit);
            if (fit) {
                slopes.push_back(fit->slope);
                entry["p2_fit_relative_rms"] = fit->rms_residual / (4.0 * r0 * 4.0 * r0);
            }
            log_r0.push_back(std::log(static_cast<double>(r0)));
            log_tau.push_back(std::log(tau.mean));
        }
        per_r0.push_back(entry);
        CsvTable table;
        table.name = "membrane_R0_" + std::to_string(r0);
        table.append(ts);
        report.tables.push_back(std::move(table));
    }
    report.json["per_R0"] = per_r0;
    auto tau_fit = try_fit(log_r0, log_tau, true);
    report.json["tau_vs_R0_loglog_fit"] = fit_or_null(tau_fit);
    report.json["tau_exponent"] = tau_fit ? json(tau_fit->slope) : json(nullptr);
    if (!slopes.empty()) {
        auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
        double mean = 0.0;
        for (double s : slopes) {
            mean += s;
        }
        mean /= static_cast<double>(slopes.size());
        report.json["p2_slopes"] = slopes;
        report.json["p2_slope_mean"] = mean;
        report.json["p2_slope_relative_spread"] = (*hi - *lo) / std::abs(mean);
    }
    report.json["fully_censored_R0_present"] = any_censored_all;
    return report;
}

// ---------------------------------------------------------------------------------------------
// typeb_lifetime

namespace {

struct TypeBTrajectory {
    int initial_count = 0;
    bool extinct = false;
    double lifetime_sweeps = 0.0;
};

}  // namespace

Report typeb_lifetime(const TypeBConfig &input, int workers) {
    const TypeBConfig config = parse_typeb(to_json(input));
    Report report;
    report.json = header(to_json(config));
    json per_l = json::array();
    std::vector<double> log_l, log_tau;
    for (size_t k = 0; k < config.l_list.size(); k++) {
        const int L = config.l_list[k];
        auto geom = geometry(3, L);
        DualGraph dual(*geom);
        FlipKernel kernel(*geom, config.h);
        const uint64_t n_links = geom->num_links();
        const uint64_t stride = std::max<uint64_t>(1, n_links / config.checks_per_sweep);
        const uint64_t budget = static_cast<uint64_t>(config.max_sweeps) * n_links;
        InitialStateSpec init{InitialKind::half_plane_membrane};
        auto trajs = run_indexed(config.trajectories, workers, [&](int64_t i) {
            Rng rng = Rng::for_stream(config.seed, static_cast<uint64_t>(k * config.trajectories + i));
            SpinState state = make_initial(geom, init, rng);
            TypeBTrajectory out;
            out.initial_count = count_noncontractible_loops(state, dual);
            for (uint64_t done = 0; done < budget;) {
                uint64_t n = std::min(stride, budget - done);
                kernel.run_steps(state, rng, n);
                done += n;
                if (count_noncontractible_loops(state, dual) == 0) {
                    out.extinct = true;
                    out.lifetime_sweeps = static_cast<double>(done) / static_cast<double>(n_links);
                    break;
                }
            }
            return out;
        });

        std::vector<double> lifetimes;
        bool count_ok = true;
        double latest = 0.0;
        for (const auto &t : trajs) {
            count_ok &= t.initial_count == 2;
            if (t.extinct) {
                lifetimes.push_back(t.lifetime_sweeps);
                latest = std::max(latest, t.lifetime_sweeps);
            }
        }
        const int64_t n = config.trajectories;
        MeanError tau = mean_and_error(lifetimes);
        double censored = 1.0 - static_cast<double>(lifetimes.size()) / n;
        json entry = {{"L", L},
                      {"initial_count_is_2", count_ok},
                      {"n_extinct", static_cast<int64_t>(lifetimes.size())},
                      {"censored_fraction", censored},
                      {"lifetime_sweeps", to_json(tau)}};
        if (!lifetimes.empty()) {
            log_l.push_back(std::log(static_cast<double>(L)));
            log_tau.push_back(std::log(tau.mean));
        }
        per_l.push_back(entry);

        CsvTable table;
        table.name = "typeb_L_" + std::to_string(L);
        int64_t end = lifetimes.size() == trajs.size() ? static_cast<int64_t>(std::ceil(latest)) : config.max_sweeps;
        for (int64_t t = 0;; t += config.record_interval_sweeps) {
            t = std::min(t, end);
            int64_t alive = 0;
            for (const auto &tr : trajs) {
                alive += !tr.extinct || tr.lifetime_sweeps > static_cast<double>(t);
            }
            double p = static_cast<double>(alive) / n;
            table.rows.push_back({t, "surviving_fraction", p, std::sqrt(p * (1 - p) / n), n});
            if (t == end) {
                break;
            }
        }
        report.tables.push_back(std::move(table));
    }
    report.json["per_L"] = per_l;
    auto fit = try_fit(log_l, log_tau, true);
    report.json["lifetime_vs_L_loglog_fit"] = fit_or_null(fit);
    report.json["alpha"] = fit ? json(fit->slope) : json(nullptr);
    return report;
}

// ---------------------------------------------------------------------------------------------
// memory

Report memory(const MemoryConfig &input, int workers) {
    const MemoryConfig config = parse_memory(to_json(input));
    auto geom = geometry(config.dim, config.L);
    SimParams params;
    params.h = config.h;
    params.seed = config.seed;
    params.n_trajectories = config.trajectories;
    params.measure_sweeps = config.max_sweeps;
    params.measure_interval_sweeps = config.record_interval_sweeps;
    InitialStateSpec init{InitialKind::sector};
    init.parity = config.sector;
    ObservableSpec spec{{Observable::sector_parity_x, Observable::sector_parity_y}, {}};
    if (config.dim == 3) {
        spec.observables.push_back(Observable::sector_parity_z);
    }
    spec.observables.push_back(Observable::sector_confidence);
    spec.observables.push_back(Observable::sector_retained);
    try {
        validate_run(*geom, params, init, spec);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("memory: ") + e.what());
    }
    auto samples = run_indexed(config.trajectories, workers,
                               [&](int64_t i) { return run_trajectory(geom, params, init, spec, i); });
    auto times = schedule(params, spec);
    TimeSeries ts = aggregate(samples, times, spec, geom->num_links(), config.h);

    const size_t retained_k = spec.observables.size() - 1, conf_k = spec.observables.size() - 2;
    json loss_times = json::array();
    int64_t n_lost = 0;
    double min_conf = 1.0;
    for (const auto &s : samples) {
        json lost = nullptr;
        for (size_t t = 0; t < times.size(); t++) {
            min_conf = std::min(min_conf, s.values[t][conf_k]);
            if (lost.is_null() && s.values[t][retained_k] == 0.0) {
                lost = times[t];
            }
        }
        n_lost += !lost.is_null();
        loss_times.push_back(lost);
    }
    Report report;
    report.json = header(to_json(config));
    report.json["first_loss_time_sweeps"] = loss_times;
    report.json["n_lost"] = n_lost;
    report.json["retained_fraction_final"] = ts.get("sector_retained").mean.back();
    report.json["confidence_final"] = {{"mean", ts.get("sector_confidence").mean.back()},
                                       {"stderr", ts.get("sector_confidence").error.back()}};
    report.json["confidence_min"] = min_conf;
    if (n_lost == 0) {
        report.json["retention_time_lower_bound_sweeps"] = times.back();
    }
    CsvTable table;
    table.name = "memory_h" + h_label(config.h);
    table.append(ts);
    report.tables.push_back(std::move(table));
    return report;
}

// ---------------------------------------------------------------------------------------------
// oracle

std::vector<double> mc_orbit_histogram(double h, int64_t steps, uint64_t seed) {
    auto geom = build_geometry(2, 3);
    oracle::GaugeOrbits orbits(*geom);
    FlipKernel kernel(*geom, h);
    Rng rng = Rng::for_stream(seed, 0);
    SpinState state(geom);
    const uint64_t mask = (uint64_t{1} << geom->num_links()) - 1;
    std::vector<uint64_t> counts(orbits.num_orbits(), 0);
    for (int64_t s = 0; s < steps; s++) {
        kernel.step(state, rng);
        counts[orbits.orbit_of(static_cast<oracle::Config>(state.spin_words()[0] & mask))]++;
    }
    std::vector<double> out(counts.size());
    for (size_t k = 0; k < counts.size(); k++) {
        out[k] = static_cast<double>(counts[k]) / static_cast<double>(steps);
    }
    return out;
}

Report oracle_report(const OracleConfig &input) {
    const OracleConfig config = parse_oracle(to_json(input));
    auto geom = geometry(2, config.L);
    Report report;
    report.json = header(to_json(config));
    report.json["tolerances"] = {{"null_space_relative", config.null_tol}, {"residual", config.residual_tol}};

    auto gen0 = oracle::build_generator(geom, 0.0, config.lambda);
    auto basis0 = oracle::steady_states(gen0, config.null_tol, config.residual_tol);
    auto gap0 = oracle::spectral_gap(gen0);
    auto left0 = oracle::check_left_limit(gen0, basis0);
    auto gen_free = oracle::build_generator(geom, 0.0, 0.0);
    report.json["h0"] = {
        {"degeneracy", basis0.degeneracy},
        {"closed_classes", basis0.closed_class_count},
        {"smallest_singular_values", std::vector<double>(basis0.smallest_singular_values.data(),
                                                         basis0.smallest_singular_values.data() +
                                                             basis0.smallest_singular_values.size())},
        {"singular_value_threshold", basis0.threshold},
        {"right_residual", basis0.right_residual},
        {"left_residual", basis0.left_residual},
        {"biorthogonality_error", basis0.biorthogonality_error},
        {"max_column_sum", gen0.max_column_sum()},
        {"gap", gap0.gap},
        {"gap_residual", gap0.residual},
        {"zero_eigenvalues", gap0.zero_eigenvalues},
        {"max_zero_eigenvalue", gap0.max_zero_eigenvalue},
        {"gap_bounded_by_gauge_sectors", gap0.bounded_by_gauge_sectors},
        {"left_limit_max_deviation", left0.max_deviation},
        {"left_limit_iterations", left0.iterations},
        {"closed_classes_without_gauge_term", oracle::count_closed_classes(gen_free.matrix)},
    };

    json per_h = json::array();
    for (double h : config.h_list) {
        auto gen = oracle::build_generator(geom, h, config.lambda);
        auto basis = oracle::steady_states(gen, config.null_tol, config.residual_tol);
        Eigen::VectorXd p = oracle::gibbs_distribution(*geom, h);
        double max_rel = ((basis.right.col(0) - p).array() / p.array()).abs().maxCoeff();
        auto db = oracle::check_detailed_balance(gen, p);
        auto gap = oracle::spectral_gap(gen);
        per_h.push_back({{"h", h},
                         {"degeneracy", basis.degeneracy},
                         {"gibbs_max_relative_deviation", max_rel},
                         {"detailed_balance_residual", db.max_residual},
                         {"detailed_balance_relative_residual", db.relative_residual},
                         {"symmetrized_asymmetry", db.symmetrized_asymmetry},
                         {"temperature", oracle::gibbs_temperature(h).value},
                         {"gap", gap.gap},
                         {"gap_residual", gap.residual},
                         {"max_column_sum", gen.max_column_sum()}});
    }
    report.json["per_h"] = per_h;

    auto dgamma = oracle::noise_generator(geom, config.pt_h);
    auto pt = oracle::first_order_pt(basis0, dgamma);
    json matrix = json::array();
    for (int r = 0; r < pt.matrix.rows(); r++) {
        std::vector<double> row(pt.matrix.cols());
        for (int c = 0; c < pt.matrix.cols(); c++) {
            row[c] = pt.matrix(r, c);
        }
        matrix.push_back(row);
    }
    report.json["perturbation"] = {{"h", config.pt_h},
                                   {"matrix", matrix},
                                   {"max_off_diagonal", pt.max_off_diagonal},
                                   {"max_off_diagonal_over_h", config.pt_h > 0 ? pt.max_off_diagonal / config.pt_h : 0.0},
                                   {"max_column_sum", pt.max_column_sum},
                                   {"max_row_sum", pt.max_row_sum},
                                   {"overlap_condition", pt.overlap_condition}};

    if (config.mc_steps > 0) {
        auto gen = oracle::build_generator(geom, config.mc_h, config.lambda);
        auto basis = oracle::steady_states(gen, config.null_tol, config.residual_tol);
        oracle::GaugeOrbits orbits(*geom);
        std::vector<double> exact(orbits.num_orbits(), 0.0);
        for (int64_t m = 0; m < gen.num_states(); m++) {
            exact[orbits.orbit_of(static_cast<oracle::Config>(m))] += basis.right(m, 0);
        }
        auto empirical = mc_orbit_histogram(config.mc_h, config.mc_steps, config.seed);
        double tv = 0.0;
        for (size_t k = 0; k < exact.size(); k++) {
            tv += std::abs(exact[k] - empirical[k]);
        }
        report.json["monte_carlo"] = {{"h", config.mc_h},
                                      {"steps", config.mc_steps},
                                      {"bins", "gauge orbits"},
                                      {"n_bins", static_cast<int64_t>(exact.size())},
                                      {"total_variation", 0.5 * tv}};
    }
    return report;
}

// ---------------------------------------------------------------------------------------------

Report run_experiment(const std::string &kind, const json &config, int workers) {
    if (kind == "wilson_scan") return wilson_scan(parse_wilson_scan(config), workers);
    if (kind == "relax_density") return relax_density(parse_relax(config), workers);
    if (kind == "membrane_shrink") return membrane_shrink(parse_membrane(config), workers);
    if (kind == "typeb_lifetime") return typeb_lifetime(parse_typeb(config), workers);
    if (kind == "memory") return memory(parse_memory(config), workers);
    if (kind == "oracle") return oracle_report(parse_oracle(config));
    throw ConfigError("unknown experiment '" + kind + "'");
}

BenchResult benchmark_kernel(int dim, int L, double h, uint64_t steps, int64_t warmup_sweeps, uint64_t seed) {
    auto geom = geometry(dim, L);
    require_h(h);
    FlipKernel kernel(*geom, h);
    Rng rng = Rng::for_stream(seed, 0);
    SpinState state(geom);
    kernel.run_sweeps(state, rng, static_cast<uint64_t>(warmup_sweeps));
    auto t0 = std::chrono::steady_clock::now();
    kernel.run_steps(state, rng, steps);
    auto t1 = std::chrono::steady_clock::now();
    BenchResult out;
    out.steps = steps;
    out.seconds = std::chrono::duration<double>(t1 - t0).count();
    out.flips_per_second = out.seconds > 0 ? static_cast<double>(steps) / out.seconds : 0.0;
    out.final_defects = state.defect_count();
    return out;
}

}  // namespace loopdyn
