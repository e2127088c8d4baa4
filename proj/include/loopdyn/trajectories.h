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

#ifndef LOOPDYN_TRAJECTORIES_H
#define LOOPDYN_TRAJECTORIES_H

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "loopdyn/dynamics.h"
#include "loopdyn/initial_states.h"
#include "loopdyn/observables.h"

namespace loopdyn {

/// Environment variable holding the default worker count.
inline constexpr const char *kWorkersEnv = "LOOPDYN_WORKERS";

/// Worker count from LOOPDYN_WORKERS, else std::thread::hardware_concurrency() (at least 1).
/// Throws std::invalid_argument if the variable is set but not a positive integer.
int default_workers();

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads and returns the results in index
/// order. Work is claimed dynamically, so scheduling varies between runs, but every result
/// depends only on its index. If any call throws, the exception of the lowest failing index is
/// rethrown after all workers stop.
template <typename Fn>
auto run_indexed(int64_t n, int workers, Fn fn) -> std::vector<decltype(fn(int64_t{0}))> {
    using Result = decltype(fn(int64_t{0}));
    std::vector<Result> results(static_cast<size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
    std::atomic<int64_t> next{0};
    std::atomic<bool> failed{false};
    auto work = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            int64_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                results[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed = true;
            }
        }
    };
    int n_threads = static_cast<int>(std::max<int64_t>(1, std::min<int64_t>(workers, n)));
    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; t++) {
            pool.emplace_back(work);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

enum class Observable {
    defect_density,
    loop_length,           // 3d: number of defect plaquettes
    loop_length_squared,   // 3d
    noncontractible_loops, // 3d
    sector_parity_x,
    sector_parity_y,
    sector_parity_z,
    sector_confidence,
    sector_retained,       // 1 if the sector readout equals the initial readout
};

std::string to_string(Observable obs);

struct ObservableSpec {
    std::vector<Observable> observables;
    /// Measurement times in sweeps, strictly increasing. Empty: warmup + k * interval for
    /// k = 0 .. measure_sweeps / interval.
    std::vector<int64_t> times;
};

struct SeriesStats {
    std::string observable;
    std::vector<double> mean;
    std::vector<double> error;  // standard error of the mean
};

/// Per-time trajectory averages.
struct TimeSeries {
    std::vector<int64_t> time_sweeps;
    /// Uniformized time steps / (num_links * (1 + h)) at each stamp.
    std::vector<double> physical_time;
    std::vector<SeriesStats> series;
    int64_t n_trajectories = 0;

    const SeriesStats &get(const std::string &name) const;
};

/// Raw samples of one trajectory: values[t][k] for time t and observable k.
struct TrajectorySamples {
    std::vector<std::vector<double>> values;
};

/// Throws std::invalid_argument if the run cannot be carried out as specified.
void validate_run(const LatticeGeometry &geom, const SimParams &params, const InitialStateSpec &init,
                  const ObservableSpec &spec);

/// Measurement schedule implied by `params` and `spec`.
std::vector<int64_t> schedule(const SimParams &params, const ObservableSpec &spec);

/// Runs one trajectory with stream `index` and records every observable at every stamp.
TrajectorySamples run_trajectory(std::shared_ptr<const LatticeGeometry> geom, const SimParams &params,
                                 const InitialStateSpec &init, const ObservableSpec &spec, int64_t index);

/// Reduces per-trajectory samples (all on `times`) in index order.
TimeSeries aggregate(const std::vector<TrajectorySamples> &samples, const std::vector<int64_t> &times,
                     const ObservableSpec &spec, uint32_t num_links, double h);

/// n_trajectories independent runs; trajectory i uses Rng::for_stream(seed, i) for both the
/// initial state and the dynamics. Means and standard errors are reduced in index order, so the
/// result is independent of `workers`. Invalid specs throw before any work starts.
TimeSeries run_trajectories(std::shared_ptr<const LatticeGeometry> geom, const SimParams &params,
                            const InitialStateSpec &init, const ObservableSpec &spec, int workers);

}  // namespace loopdyn

#endif
