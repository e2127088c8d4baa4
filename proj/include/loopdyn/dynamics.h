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

#ifndef LOOPDYN_DYNAMICS_H
#define LOOPDYN_DYNAMICS_H

#include <array>
#include <cstdint>
#include <stdexcept>

#include "loopdyn/lattice.h"
#include "loopdyn/rng.h"
#include "loopdyn/spin_state.h"

namespace loopdyn {

struct SimParams {
    double h = 0.0;
    uint64_t seed = 0;
    int64_t warmup_sweeps = 0;
    int64_t measure_sweeps = 0;
    int64_t measure_interval_sweeps = 1;
    int64_t n_trajectories = 1;

    /// Throws std::invalid_argument on h < 0, negative sweep counts, or a zero interval.
    void validate() const;
};

/// Glauber weight P^2(s): 1 for s < 0, 1/2 for s = 0, 0 for s > 0.
constexpr double glauber_weight(int local_sum) {
    return local_sum < 0 ? 1.0 : local_sum == 0 ? 0.5 : 0.0;
}

/// Continuous-time flip rate of a link with local sum s: h + P^2(s).
constexpr double flip_rate(int local_sum, double h) { return h + glauber_weight(local_sum); }

/// Discrete acceptance probability of an attempted flip, flip_rate / (1 + h).
///   s > 0 (flip lowers sum B_p): h/(1+h);  s = 0: (1/2+h)/(1+h);  s < 0: 1.
constexpr double accept_probability(int local_sum, double h) {
    return local_sum < 0 ? 1.0 : flip_rate(local_sum, h) / (1.0 + h);
}

/// Single-threaded constrained-Glauber kernel bound to one geometry and one h.
///
/// One step picks a link uniformly at random and flips it with accept_probability(s_l, h).
/// The top 32 bits of a 64-bit draw choose the link (exact, by rejection); the low 32 bits are
/// compared against a fixed-point threshold, so each acceptance probability is realized to within
/// 2^-33. A_v moves are not part of the kernel.
class FlipKernel {
   public:
    FlipKernel(const LatticeGeometry &geom, double h);

    double h() const { return h_; }

    inline void step(SpinState &state, Rng &rng) const {
        uint64_t r = rng();
        LinkId l = pick_link(r, rng);
        int ndef = adjacent_defects(state, l);
        if ((r & 0xFFFFFFFFULL) < threshold_[ndef]) {
            state.flip_link(l);
        }
    }

    void run_steps(SpinState &state, Rng &rng, uint64_t n_steps) const;
    void run_sweeps(SpinState &state, Rng &rng, uint64_t n_sweeps) const {
        run_steps(state, rng, n_sweeps * num_links_);
    }

    /// Runs at most `n_steps` steps, stopping right after the step that leaves zero defects.
    /// Returns the number of steps executed. Returns 0 if the state is already defect-free.
    uint64_t run_steps_until_defect_free(SpinState &state, Rng &rng, uint64_t n_steps) const;

    /// Same as run_steps but throws std::logic_error if the defect count ever increases.
    void run_steps_checked_monotone(SpinState &state, Rng &rng, uint64_t n_steps) const;

    uint32_t num_links() const { return num_links_; }
    /// Fixed-point acceptance threshold (out of 2^32) for a link with `ndef` adjacent defects.
    uint64_t threshold(int ndef) const { return threshold_[ndef]; }

   private:
    inline LinkId pick_link(uint64_t &r, Rng &rng) const {
        while (true) {
            uint64_t m = (r >> 32) * num_links_;
            uint32_t low = static_cast<uint32_t>(m);
            if (low >= num_links_ || low >= reject_below_) {
                return static_cast<LinkId>(m >> 32);
            }
            r = rng();
        }
    }

    inline int adjacent_defects(const SpinState &state, LinkId l) const {
        const PlaquetteId *ps = link_plaquettes_ + static_cast<size_t>(per_link_) * l;
        const uint8_t *d = state.defects().data();
        int n = 0;
        for (int k = 0; k < per_link_; k++) {
            n += d[ps[k]];
        }
        return n;
    }

    double h_;
    uint32_t num_links_;
    uint32_t reject_below_;
    int per_link_;
    const PlaquetteId *link_plaquettes_;
    std::array<uint64_t, 5> threshold_{};
};

/// One attempted flip with the rule above. Convenience wrapper; loops should reuse a FlipKernel.
void mc_step(SpinState &state, const SimParams &params, Rng &rng);

/// Exactly n_sweeps * num_links attempted flips.
void run_sweeps(SpinState &state, const SimParams &params, uint64_t n_sweeps, Rng &rng);

/// Uniformized physical time of `steps` attempted flips: steps / (num_links * (1 + h)).
double physical_time(uint64_t steps, uint32_t num_links, double h);

}  // namespace loopdyn

#endif
