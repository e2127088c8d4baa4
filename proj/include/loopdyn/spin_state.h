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

#ifndef LOOPDYN_SPIN_STATE_H
#define LOOPDYN_SPIN_STATE_H

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "loopdyn/lattice.h"

namespace loopdyn {

/// Sigma^z configuration on links, with the plaquette field B_p and defect count kept in sync.
///
/// Spin bit 0 means sigma^z = +1, bit 1 means sigma^z = -1. `defect(p)` is 1 iff B_p = -1.
/// Every mutation goes through flip_link / apply_vertex so the cached plaquette field never drifts
/// from the spins.
class SpinState {
   public:
    /// All-up configuration |⇑⟩.
    explicit SpinState(std::shared_ptr<const LatticeGeometry> geom);

    const LatticeGeometry &geometry() const { return *geom_; }
    const std::shared_ptr<const LatticeGeometry> &geometry_ptr() const { return geom_; }

    bool spin_down(LinkId l) const { return (spins_[l >> 6] >> (l & 63)) & 1; }
    /// sigma^z_l as +1/-1.
    int sigma_z(LinkId l) const { return spin_down(l) ? -1 : 1; }
    uint8_t defect(PlaquetteId p) const { return defects_[p]; }
    /// B_p as +1/-1.
    int b_value(PlaquetteId p) const { return defects_[p] ? -1 : 1; }
    int64_t defect_count() const { return defect_count_; }

    /// s_l = sum of B_p over plaquettes containing l.
    int local_sum(LinkId l) const;

    /// sigma^x_l; O(1). Updates B_p on the plaquettes of l and the defect count.
    inline void flip_link(LinkId l) {
        spins_[l >> 6] ^= uint64_t{1} << (l & 63);
        const PlaquetteId *ps = link_plaquettes_ + static_cast<size_t>(per_link_) * l;
        int delta = 0;
        for (int k = 0; k < per_link_; k++) {
            uint8_t &d = defects_[ps[k]];
            delta += 1 - 2 * d;
            d ^= 1;
        }
        defect_count_ += delta;
    }

    /// A_v gauge move: flips every link touching v. Leaves the plaquette field unchanged.
    void apply_vertex(VertexId v);

    /// Builds B_p and the defect count from the spins alone, ignoring the cached values.
    struct Scratch {
        std::vector<int8_t> b_field;
        int64_t defect_count;
    };
    Scratch recompute_from_scratch() const;
    /// True iff the cached plaquette field matches recompute_from_scratch().
    bool consistent() const;

    const std::vector<uint64_t> &spin_words() const { return spins_; }
    const std::vector<uint8_t> &defects() const { return defects_; }

    /// Replaces the spins and rebuilds the plaquette field; `words` must hold num_links bits.
    void assign_spins(std::vector<uint64_t> words);

    bool operator==(const SpinState &other) const;

    /// Checkpoint format: u32 dim | u32 L (little-endian) | ceil(num_links/8) bytes, where link l
    /// is bit (l % 8) of byte (l / 8). Padding bits past num_links are zero.
    void serialize(std::ostream &out) const;
    static SpinState deserialize(std::istream &in);
    std::vector<uint8_t> to_bytes() const;
    static SpinState from_bytes(const std::vector<uint8_t> &bytes);

   private:
    std::shared_ptr<const LatticeGeometry> geom_;
    const PlaquetteId *link_plaquettes_;
    int per_link_;
    std::vector<uint64_t> spins_;
    std::vector<uint8_t> defects_;
    int64_t defect_count_ = 0;
};

}  // namespace loopdyn

#endif
