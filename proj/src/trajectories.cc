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

#include "loopdyn/trajectories.h"

#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>

#include "loopdyn/stats.h"

namespace loopdyn {

int default_workers() {
    if (const char *env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
        char *end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 4096) {
            throw std::invalid_argument(std::string(kWorkersEnv) + " must be a positive integer, got '" + env + "'");
        }
        return static_cast<int>(v);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string to_string(Observable obs) {
    switch (obs) {
        case Observable::defect_density:
            return "defect_density";
        case Observable::loop_length:
            return "loop_length";
        case Observable::loop_length_squared:
            return "loop_length_squared";
        case Observable::noncontractible_loops:
            return "noncontractible_loops";
        case Observable::sector_parity_x:
            return "sector_parity_x";
        case Observable::sector_parity_y:
            return "sector_parity_y";
        case Observable::sector_parity_z:
            return "sector_parity_z";
        case Observable::sector_confidence:
            return "sector_confidence";
        case Observable::sector_retained:
            return "sector_retained";
    }
    return "unknown";
}

const SeriesStats &TimeSeries::get(const std::string &name) const {
    for (const auto &s : series) {
        if (s.observable == name) {
            return s;
        }
    }
    throw std::out_of_range("no series named '" + name + "'");
}

namespace {

bool needs_3d(Observable obs) {
    return obs == Observable::loop_length || obs == Observable::loop_length_squared ||
           obs == Observable::noncontractible_loops || obs == Observable::sector_parity_z;
}

bool needs_sector(Observable obs) {
    return obs == Observable::sector_parity_x || obs == Observable::sector_parity_y ||
           obs == Observable::sector_parity_z || obs == Observable::sector_confidence ||
           obs == Observable::sector_retained;
}

}  // namespace

void validate_run(const LatticeGeometry &geom, const SimParams &params, const InitialStateSpec &init,
                  const ObservableSpec &spec) {
    params.validate();
    init.validate(geom);
    if (spec.observables.empty()) {
        throw std::invalid_argument("no observables requested");
    }
    for (Observable obs : spec.observables) {
        if (needs_3d(obs) && geom.dim() != 3) {
            throw std::invalid_argument(to_string(obs) + " requires a 3d lattice");
        }
    }
    for (size_t k = 0; k < spec.times.size(); k++) {
        if (spec.times[k] < 0 || (k > 0 && spec.times[k] <= spec.times[k - 1])) {
            throw std::invalid_argument("measurement times must be non-negative and strictly increasing");
        }
    }
}

std::vector<int64_t> schedule(const SimParams &params, const ObservableSpec &spec) {
    if (!spec.times.empty()) {
        return spec.times;
    }
    std::vector<int64_t> times;
    for (int64_t t = 0; t <= params.measure_sweeps; t += params.measure_interval_sweeps) {
        times.push_back(params.warmup_sweeps + t);
    }
    return times;
}

TrajectorySamples run_trajectory(std::shared_ptr<const LatticeGeometry> geom, const SimParams &params,
                                 const InitialStateSpec &init, const ObservableSpec &spec, int64_t index) {
    Rng rng = Rng::for_stream(params.seed, static_cast<uint64_t>(index));
    SpinState state = make_initial(geom, init, rng);
    FlipKernel kernel(*geom, params.h);
    std::optional<DualGraph> dual;
    bool want_sector = false;
    for (Observable obs : spec.observables) {
        if (obs == Observable::noncontractible_loops) {
            dual.emplace(*geom);
        }
        want_sector |= needs_sector(obs);
    }
    SectorReadout initial_sector = measure_sector(state);

    TrajectorySamples out;
    int64_t now = 0;
    for (int64_t t : schedule(params, spec)) {
        kernel.run_sweeps(state, rng, static_cast<uint64_t>(t - now));
        now = t;
        SectorReadout sector;
        if (want_sector) {
            sector = measure_sector(state);
        }
        std::vector<double> row;
        row.reserve(spec.observables.size());
        for (Observable obs : spec.observables) {
            switch (obs) {
                case Observable::defect_density:
                    row.push_back(defect_density(state));
                    break;
                case Observable::loop_length:
                    row.push_back(static_cast<double>(total_loop_length(state)));
                    break;
                case Observable::loop_length_squared: {
                    double p = static_cast<double>(total_loop_length(state));
                    row.push_back(p * p);
                    break;
                }
                case Observable::noncontractible_loops:
                    row.push_back(count_noncontractible_loops(state, *dual));
                    break;
                case Observable::sector_parity_x:
                case Observable::sector_parity_y:
                case Observable::sector_parity_z:
                    row.push_back(sector.parity[static_cast<int>(obs) - static_cast<int>(Observable::sector_parity_x)]);
                    break;
                case Observable::sector_confidence:
                    row.push_back(sector.confidence);
                    break;
                case Observable::sector_retained:
                    row.push_back(sector.parity == initial_sector.parity ? 1.0 : 0.0);
                    break;
            }
        }
        out.values.push_back(std::move(row));
    }
    return out;
}

TimeSeries aggregate(const std::vector<TrajectorySamples> &samples, const std::vector<int64_t> &times,
                     const ObservableSpec &spec, uint32_t num_links, double h) {
    TimeSeries ts;
    ts.time_sweeps = times;
    ts.n_trajectories = static_cast<int64_t>(samples.size());
    for (int64_t t : times) {
        ts.physical_time.push_back(physical_time(static_cast<uint64_t>(t) * num_links, num_links, h));
    }
    std::vector<double> column(samples.size());
    for (size_t k = 0; k < spec.observables.size(); k++) {
        SeriesStats s;
        s.observable = to_string(spec.observables[k]);
        for (size_t t = 0; t < times.size(); t++) {
            for (size_t i = 0; i < samples.size(); i++) {
                column[i] = samples[i].values.at(t).at(k);
            }
            MeanError me = mean_and_error(column);
            s.mean.push_back(me.mean);
            s.error.push_back(me.error);
        }
        ts.series.push_back(std::move(s));
    }
    return ts;
}

TimeSeries run_trajectories(std::shared_ptr<const LatticeGeometry> geom, const SimParams &params,
                            const InitialStateSpec &init, const ObservableSpec &spec, int workers) {
    validate_run(*geom, params, init, spec);
    auto samples = run_indexed(params.n_trajectories, workers,
                               [&](int64_t i) { return run_trajectory(geom, params, init, spec, i); });
    return aggregate(samples, schedule(params, spec), spec, geom->num_links(), params.h);
}

}  // namespace loopdyn
