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

#ifndef LOOPDYN_OBSERVABLES_H
#define LOOPDYN_OBSERVABLES_H

#include <array>
#include <cstdint>
#include <vector>

#include "loopdyn/lattice.h"
#include "loopdyn/spin_state.h"

namespace loopdyn {

/// A planar rectangular loop: `extent_a` links along the first axis of `plane`, `extent_b` along
/// the second, with lowest corner at `origin`.
struct Rectangle {
    uint32_t origin = 0;
    int plane = 0;
    int extent_a = 1;
    int extent_b = 1;

    int perimeter() const { return 2 * (extent_a + extent_b); }
    int area() const { return extent_a * extent_b; }
};

/// The 2(a+b) boundary links of a rectangle, in traversal order.
std::vector<LinkId> rectangle_boundary(const LatticeGeometry &geom, const Rectangle &rect);

/// Throws std::invalid_argument unless 1 <= a, b < L and the plane exists.
void validate_rectangle(const LatticeGeometry &geom, const Rectangle &rect);

/// W_gamma = product of sigma^z over the boundary links.
int wilson_value(const SpinState &state, const Rectangle &rect);

/// Which rectangles a Wilson measurement averages over.
struct WilsonSpec {
    int a = 1;
    int b = 1;
    /// Empty means every plane of the lattice.
    std::vector<int> planes;
    /// Also average the b x a orientation when a != b.
    bool both_orientations = true;
};

/// Averages W over all translations of the rectangles described by a list of WilsonSpecs.
///
/// Segment parities along every straight line are read from per-line prefix XORs, so each
/// placement costs O(1) once the prefix table for a state is built.
class WilsonSampler {
   public:
    WilsonSampler(const LatticeGeometry &geom, std::vector<WilsonSpec> specs);

    const std::vector<WilsonSpec> &specs() const { return specs_; }
    /// Number of rectangle placements averaged for spec `k`.
    uint64_t placements(size_t k) const;

    /// Mean W per spec for one configuration.
    std::vector<double> measure(const SpinState &state);

   private:
    // A segment of n links along `axis`, used as a rectangle side.
    struct Side {
        int axis;
        int n;
    };
    struct Shape {
        size_t side_a;  // slot of (u, extent_a)
        size_t side_b;  // slot of (v, extent_b)
    };
    size_t side_slot(int axis, int n);

    const LatticeGeometry *geom_;
    std::vector<WilsonSpec> specs_;
    std::vector<std::vector<Shape>> shapes_;  // per spec
    std::vector<Side> sides_;
    // For direction d and site s: line index and position of s on its line along d.
    std::vector<uint32_t> line_of_;
    std::vector<uint32_t> pos_of_;
    std::vector<uint8_t> prefix_;        // [d][line][0..2L]
    std::vector<uint32_t> side_shift_;   // [slot][site]: site moved n steps along axis
    std::vector<uint8_t> side_parity_;   // [slot][site]: parity of the segment starting at site
};

/// Mean W over all placements of a spec, by direct products over boundary links. Test reference
/// for WilsonSampler.
double wilson_average_brute_force(const SpinState &state, const WilsonSpec &spec);

/// Fraction of plaquettes with B_p = -1.
double defect_density(const SpinState &state);

/// Total length of loop defects (3d): the number of defect plaquettes, each one dual link.
/// Throws std::invalid_argument unless dim = 3.
int64_t total_loop_length(const SpinState &state);

struct LoopComponent {
    uint32_t length = 0;
    /// Per-axis winding parity (Z2 homology class), bit i for axis i.
    uint8_t homology = 0;
};

/// Connected components of the defect dual graph (3d), with their Z2 homology classes.
/// Throws std::logic_error if any cube has an odd number of defect faces.
std::vector<LoopComponent> loop_components(const SpinState &state, const DualGraph &dual);

/// Number of defect components with a nonzero homology class (3d).
int count_noncontractible_loops(const SpinState &state, const DualGraph &dual);

/// True iff every cube has an even number of defect faces (3d).
bool cube_parity_ok(const SpinState &state, const DualGraph &dual);

/// Topological sector readout. `parity[i]` is the majority parity of straight cycles along
/// axis i (cycles with product sigma^z = -1 count as odd); `confidence` is the smallest
/// majority fraction over axes. Ties read as parity 0 with fraction 1/2.
struct SectorReadout {
    std::array<int, 3> parity{0, 0, 0};
    std::array<double, 3> axis_confidence{1.0, 1.0, 1.0};
    double confidence = 1.0;
};
SectorReadout measure_sector(const SpinState &state);

/// Product of sigma^z along one straight cycle, as 0 (even) or 1 (odd).
int cycle_parity(const SpinState &state, int direction, uint32_t index);

}  // namespace loopdyn

#endif
