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

#ifndef LOOPDYN_INITIAL_STATES_H
#define LOOPDYN_INITIAL_STATES_H

#include <array>
#include <memory>
#include <string>

#include "loopdyn/lattice.h"
#include "loopdyn/rng.h"
#include "loopdyn/spin_state.h"

namespace loopdyn {

enum class InitialKind { all_up, random, sector, square_membrane, half_plane_membrane, defect_pair };

/// Parse/print the config names: "all_up", "random", "sector", "square_membrane",
/// "half_plane_membrane", "defect_pair".
InitialKind initial_kind_from_string(const std::string &name);
std::string to_string(InitialKind kind);

struct InitialStateSpec {
    InitialKind kind = InitialKind::all_up;
    /// Side of the square membrane.
    int r0 = 0;
    /// Sector parities indexed by cycle axis: parity[i] is the winding parity of straight cycles
    /// along axis i, produced by one membrane perpendicular to i.
    std::array<int, 3> parity{0, 0, 0};
    /// Defect-pair separation in plaquettes (2d).
    int separation = 1;

    /// Throws std::invalid_argument if the spec cannot be realized on `geom`.
    void validate(const LatticeGeometry &geom) const;
};

/// Membrane perpendicular to `axis` through coordinate 0: flips every axis-oriented link whose
/// start site has coordinate 0 along `axis`. Toggles the parity of all straight cycles along
/// `axis` and creates no defects.
void apply_sector_membrane(SpinState &state, int axis);

/// Builds the initial configuration. `rng` is only consumed by InitialKind::random.
///
///   all_up              no defects, sector (0,...,0)
///   random              every spin iid uniform
///   sector              all_up with one membrane per odd parity
///   square_membrane     3d: z-links at z = L/2 with x, y in [o, o + r0), o = (L - r0)/2; the
///                       defect set is the boundary loop of length 4*r0
///   half_plane_membrane 3d, even L: z-links at z = 0 with x in [0, L/2) and all y; two straight
///                       non-contractible defect loops along y
///   defect_pair         2d: y-links at y = L/2, x in [1, 1 + separation); two defects
///                       `separation` plaquettes apart
SpinState make_initial(std::shared_ptr<const LatticeGeometry> geom, const InitialStateSpec &spec, Rng &rng);

}  // namespace loopdyn

#endif
