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

#include "loopdyn/initial_states.h"

#include <stdexcept>

namespace loopdyn {

InitialKind initial_kind_from_string(const std::string &name) {
    if (name == "all_up") return InitialKind::all_up;
    if (name == "random") return InitialKind::random;
    if (name == "sector") return InitialKind::sector;
    if (name == "square_membrane") return InitialKind::square_membrane;
    if (name == "half_plane_membrane") return InitialKind::half_plane_membrane;
    if (name == "defect_pair") return InitialKind::defect_pair;
    throw std::invalid_argument("unknown initial state kind '" + name + "'");
}

std::string to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::all_up:
            return "all_up";
        case InitialKind::random:
            return "random";
        case InitialKind::sector:
            return "sector";
        case InitialKind::square_membrane:
            return "square_membrane";
        case InitialKind::half_plane_membrane:
            return "half_plane_membrane";
        case InitialKind::defect_pair:
            return "defect_pair";
    }
    return "unknown";
}

void InitialStateSpec::validate(const LatticeGeometry &geom) const {
    switch (kind) {
        case InitialKind::all_up:
        case InitialKind::random:
            return;
        case InitialKind::sector:
            for (int k = 0; k < 3; k++) {
                if (parity[k] != 0 && parity[k] != 1) {
                    throw std::invalid_argument("sector parities must be 0 or 1");
                }
                if (k >= geom.dim() && parity[k] != 0) {
                    throw std::invalid_argument("sector parity set for an axis the lattice does not have");
                }
            }
            return;
        case InitialKind::square_membrane:
            if (geom.dim() != 3) {
                throw std::invalid_argument("square_membrane requires a 3d lattice");
            }
            if (r0 < 1 || r0 >= geom.L()) {
                throw std::invalid_argument("square_membrane needs 1 <= r0 < L");
            }
            return;
        case InitialKind::half_plane_membrane:
            if (geom.dim() != 3) {
                throw std::invalid_argument("half_plane_membrane requires a 3d lattice");
            }
            if (geom.L() % 2 != 0) {
                throw std::invalid_argument("half_plane_membrane requires even L");
            }
            return;
        case InitialKind::defect_pair:
            if (geom.dim() != 2) {
                throw std::invalid_argument("defect_pair requires a 2d lattice");
            }
            if (separation < 1 || separation >= geom.L()) {
                throw std::invalid_argument("defect_pair needs 1 <= separation < L");
            }
            return;
    }
}

void apply_sector_membrane(SpinState &state, int axis) {
    const LatticeGeometry &geom = state.geometry();
    if (axis < 0 || axis >= geom.dim()) {
        throw std::invalid_argument("membrane axis out of range");
    }
    for (uint32_t s = 0; s < geom.num_vertices(); s++) {
        if (geom.site_coord(s)[axis] == 0) {
            state.flip_link(geom.link(s, axis));
        }
    }
}

SpinState make_initial(std::shared_ptr<const LatticeGeometry> geom, const InitialStateSpec &spec, Rng &rng) {
    spec.validate(*geom);
    SpinState state(geom);
    const int L = geom->L();
    switch (spec.kind) {
        case InitialKind::all_up:
            break;
        case InitialKind::random: {
            std::vector<uint64_t> words(state.spin_words().size());
            for (auto &w : words) {
                w = rng();
            }
            state.assign_spins(std::move(words));
            break;
        }
        case InitialKind::sector:
            for (int axis = 0; axis < geom->dim(); axis++) {
                if (spec.parity[axis]) {
                    apply_sector_membrane(state, axis);
                }
            }
            break;
        case InitialKind::square_membrane: {
            int o = (L - spec.r0) / 2;
            for (int x = o; x < o + spec.r0; x++) {
                for (int y = o; y < o + spec.r0; y++) {
                    state.flip_link(geom->link(geom->site_index({x, y, L / 2}), 2));
                }
            }
            break;
        }
        case InitialKind::half_plane_membrane:
            for (int x = 0; x < L / 2; x++) {
                for (int y = 0; y < L; y++) {
                    state.flip_link(geom->link(geom->site_index({x, y, 0}), 2));
                }
            }
            break;
        case InitialKind::defect_pair:
            for (int x = 1; x < 1 + spec.separation; x++) {
                state.flip_link(geom->link(geom->site_index({x, L / 2, 0}), 1));
            }
            break;
    }
    return state;
}

}  // namespace loopdyn
