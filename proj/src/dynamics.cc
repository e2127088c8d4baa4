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

#include "loopdyn/dynamics.h"

#include <cmath>
#include <string>

namespace loopdyn {

void SimParams::validate() const {
    if (!(h >= 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("h must be a finite non-negative number");
    }
    if (warmup_sweeps < 0 || measure_sweeps < 0) {
        throw std::invalid_argument("sweep counts must be non-negative");
    }
    if (measure_interval_sweeps < 1) {
        throw std::invalid_argument("measure_interval_sweeps must be at least 1");
    }
    if (n_trajectories < 1) {
        throw std::invalid_argument("n_trajectories must be at least 1");
    }
}

FlipKernel::FlipKernel(const LatticeGeometry &geom, double h)
    : h_(h),
      num_links_(geom.num_links()),
      reject_below_(static_cast<uint32_t>(-num_links_) % num_links_),
      per_link_(geom.plaquettes_per_link()),
      link_plaquettes_(geom.link_plaquette_table()) {
    if (!(h >= 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("h must be a finite non-negative number");
    }
    for (int ndef = 0; ndef <= per_link_; ndef++) {
        int s = per_link_ - 2 * ndef;
        double p = accept_probability(s, h);
        threshold_[ndef] = p >= 1.0 ? (uint64_t{1} << 32) : static_cast<uint64_t>(std::llround(std::ldexp(p, 32)));
    }
}

void FlipKernel::run_steps(SpinState &state, Rng &rng, uint64_t n_steps) const {
    for (uint64_t k = 0; k < n_steps; k++) {
        step(state, rng);
    }
}

uint64_t FlipKernel::run_steps_until_defect_free(SpinState &state, Rng &rng, uint64_t n_steps) const {
    if (state.defect_count() == 0) {
        return 0;
    }
    for (uint64_t k = 0; k < n_steps; k++) {
        step(state, rng);
        if (state.defect_count() == 0) {
            return k + 1;
        }
    }
    return n_steps;
}

void FlipKernel::run_steps_checked_monotone(SpinState &state, Rng &rng, uint64_t n_steps) const {
    int64_t prev = state.defect_count();
    for (uint64_t k = 0; k < n_steps; k++) {
        step(state, rng);
        int64_t cur = state.defect_count();
        if (cur > prev) {
            throw std::logic_error("defect count increased from " + std::to_string(prev) + " to " +
                                   std::to_string(cur) + " at step " + std::to_string(k));
        }
        prev = cur;
    }
}

void mc_step(SpinState &state, const SimParams &params, Rng &rng) {
    FlipKernel(state.geometry(), params.h).step(state, rng);
}

void run_sweeps(SpinState &state, const SimParams &params, uint64_t n_sweeps, Rng &rng) {
    FlipKernel(state.geometry(), params.h).run_sweeps(state, rng, n_sweeps);
}

double physical_time(uint64_t steps, uint32_t num_links, double h) {
    return static_cast<double>(steps) / (static_cast<double>(num_links) * (1.0 + h));
}

}  // namespace loopdyn
