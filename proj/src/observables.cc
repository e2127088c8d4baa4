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

#include "loopdyn/observables.h"

#include <numeric>
#include <stdexcept>
#include <string>

namespace loopdyn {

namespace {

std::vector<int> resolve_planes(const LatticeGeometry &geom, const std::vector<int> &planes) {
    if (!planes.empty()) {
        for (int p : planes) {
            if (p < 0 || p >= geom.num_planes()) {
                throw std::invalid_argument("Wilson plane index " + std::to_string(p) + " out of range");
            }
        }
        return planes;
    }
    std::vector<int> all(geom.num_planes());
    std::iota(all.begin(), all.end(), 0);
    return all;
}

// Every (plane, extent_a, extent_b) shape a spec averages over.
std::vector<Rectangle> spec_shapes(const LatticeGeometry &geom, const WilsonSpec &spec) {
    std::vector<Rectangle> shapes;
    for (int plane : resolve_planes(geom, spec.planes)) {
        shapes.push_back({0, plane, spec.a, spec.b});
        if (spec.both_orientations && spec.a != spec.b) {
            shapes.push_back({0, plane, spec.b, spec.a});
        }
    }
    for (const auto &s : shapes) {
        validate_rectangle(geom, s);
    }
    return shapes;
}

struct UnionFind {
    std::vector<uint32_t> parent;
    explicit UnionFind(uint32_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    uint32_t find(uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(uint32_t a, uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[a] = b;
        }
    }
};

void require_3d(const LatticeGeometry &geom, const char *what) {
    if (geom.dim() != 3) {
        throw std::invalid_argument(std::string(what) + " requires a 3d lattice");
    }
}

}  // namespace

void validate_rectangle(const LatticeGeometry &geom, const Rectangle &rect) {
    if (rect.plane < 0 || rect.plane >= geom.num_planes()) {
        throw std::invalid_argument("rectangle plane out of range");
    }
    if (rect.extent_a < 1 || rect.extent_b < 1 || rect.extent_a >= geom.L() || rect.extent_b >= geom.L()) {
        throw std::invalid_argument("rectangle " + std::to_string(rect.extent_a) + "x" +
                                    std::to_string(rect.extent_b) + " does not fit a lattice of size " +
                                    std::to_string(geom.L()));
    }
    if (rect.origin >= geom.num_vertices()) {
        throw std::invalid_argument("rectangle origin out of range");
    }
}

std::vector<LinkId> rectangle_boundary(const LatticeGeometry &geom, const Rectangle &rect) {
    validate_rectangle(geom, rect);
    auto [u, v] = geom.plane_axes(rect.plane);
    std::vector<LinkId> links;
    links.reserve(rect.perimeter());
    uint32_t s = rect.origin;
    for (int k = 0; k < rect.extent_a; k++) {
        links.push_back(geom.link(s, u));
        s = geom.shifted(s, u, 1);
    }
    for (int k = 0; k < rect.extent_b; k++) {
        links.push_back(geom.link(s, v));
        s = geom.shifted(s, v, 1);
    }
    for (int k = 0; k < rect.extent_a; k++) {
        s = geom.shifted(s, u, -1);
        links.push_back(geom.link(s, u));
    }
    for (int k = 0; k < rect.extent_b; k++) {
        s = geom.shifted(s, v, -1);
        links.push_back(geom.link(s, v));
    }
    return links;
}

int wilson_value(const SpinState &state, const Rectangle &rect) {
    int prod = 1;
    for (LinkId l : rectangle_boundary(state.geometry(), rect)) {
        prod *= state.sigma_z(l);
    }
    return prod;
}

WilsonSampler::WilsonSampler(const LatticeGeometry &geom, std::vector<WilsonSpec> specs)
    : geom_(&geom), specs_(std::move(specs)) {
    const uint32_t n_sites = geom.num_vertices();
    for (const auto &spec : specs_) {
        std::vector<Shape> shapes;
        for (const auto &rect : spec_shapes(geom, spec)) {
            auto [u, v] = geom.plane_axes(rect.plane);
            shapes.push_back({side_slot(u, rect.extent_a), side_slot(v, rect.extent_b)});
        }
        shapes_.push_back(std::move(shapes));
    }
    side_shift_.resize(sides_.size() * n_sites);
    for (size_t k = 0; k < sides_.size(); k++) {
        for (uint32_t s = 0; s < n_sites; s++) {
            side_shift_[k * n_sites + s] = geom.shifted(s, sides_[k].axis, sides_[k].n);
        }
    }
    side_parity_.resize(sides_.size() * n_sites);

    const uint32_t n_lines = geom.num_cycles_per_direction();
    const int L = geom.L();
    line_of_.resize(static_cast<size_t>(geom.dim()) * n_sites);
    pos_of_.resize(static_cast<size_t>(geom.dim()) * n_sites);
    for (int d = 0; d < geom.dim(); d++) {
        for (uint32_t line = 0; line < n_lines; line++) {
            auto links = geom.straight_cycle(d, line);
            for (int k = 0; k < L; k++) {
                uint32_t s = geom.link_site(links[k]);
                line_of_[static_cast<size_t>(d) * n_sites + s] = line;
                pos_of_[static_cast<size_t>(d) * n_sites + s] = static_cast<uint32_t>(k);
            }
        }
    }
    prefix_.resize(static_cast<size_t>(geom.dim()) * n_lines * (2 * L + 1));
}

size_t WilsonSampler::side_slot(int axis, int n) {
    for (size_t k = 0; k < sides_.size(); k++) {
        if (sides_[k].axis == axis && sides_[k].n == n) {
            return k;
        }
    }
    sides_.push_back({axis, n});
    return sides_.size() - 1;
}

uint64_t WilsonSampler::placements(size_t k) const {
    return shapes_.at(k).size() * static_cast<uint64_t>(geom_->num_vertices());
}

std::vector<double> WilsonSampler::measure(const SpinState &state) {
    const LatticeGeometry &geom = *geom_;
    if (state.geometry().dim() != geom.dim() || state.geometry().L() != geom.L()) {
        throw std::invalid_argument("state does not match the sampler's lattice");
    }
    const int L = geom.L();
    const size_t stride = 2 * static_cast<size_t>(L) + 1;
    const uint32_t n_sites = geom.num_vertices();
    const uint32_t n_lines = geom.num_cycles_per_direction();
    for (int d = 0; d < geom.dim(); d++) {
        for (uint32_t line = 0; line < n_lines; line++) {
            auto links = geom.straight_cycle(d, line);
            uint8_t *pre = &prefix_[(static_cast<size_t>(d) * n_lines + line) * stride];
            pre[0] = 0;
            for (int k = 0; k < 2 * L; k++) {
                pre[k + 1] = pre[k] ^ static_cast<uint8_t>(state.spin_down(links[k % L]));
            }
        }
    }
    for (size_t k = 0; k < sides_.size(); k++) {
        const int d = sides_[k].axis, n = sides_[k].n;
        const uint32_t *line = &line_of_[static_cast<size_t>(d) * n_sites];
        const uint32_t *pos = &pos_of_[static_cast<size_t>(d) * n_sites];
        uint8_t *out = &side_parity_[k * n_sites];
        for (uint32_t s = 0; s < n_sites; s++) {
            const uint8_t *pre = &prefix_[(static_cast<size_t>(d) * n_lines + line[s]) * stride];
            out[s] = pre[pos[s] + n] ^ pre[pos[s]];
        }
    }

    std::vector<double> result;
    result.reserve(specs_.size());
    for (const auto &shapes : shapes_) {
        int64_t odd = 0;
        for (const auto &shape : shapes) {
            const uint8_t *pa = &side_parity_[shape.side_a * n_sites];
            const uint8_t *pb = &side_parity_[shape.side_b * n_sites];
            const uint32_t *move_a = &side_shift_[shape.side_a * n_sites];
            const uint32_t *move_b = &side_shift_[shape.side_b * n_sites];
            for (uint32_t s = 0; s < n_sites; s++) {
                // Sides: s along u, s + b e_v along u, s along v, s + a e_u along v.
                odd += pa[s] ^ pa[move_b[s]] ^ pb[s] ^ pb[move_a[s]];
            }
        }
        const double total = static_cast<double>(shapes.size()) * n_sites;
        result.push_back((total - 2.0 * static_cast<double>(odd)) / total);
    }
    return result;
}

double wilson_average_brute_force(const SpinState &state, const WilsonSpec &spec) {
    const LatticeGeometry &geom = state.geometry();
    int64_t sum = 0;
    auto shapes = spec_shapes(geom, spec);
    for (auto shape : shapes) {
        for (uint32_t s = 0; s < geom.num_vertices(); s++) {
            shape.origin = s;
            sum += wilson_value(state, shape);
        }
    }
    return static_cast<double>(sum) / (static_cast<double>(shapes.size()) * geom.num_vertices());
}

double defect_density(const SpinState &state) {
    return static_cast<double>(state.defect_count()) / state.geometry().num_plaquettes();
}

int64_t total_loop_length(const SpinState &state) {
    require_3d(state.geometry(), "total loop length");
    return state.defect_count();
}

bool cube_parity_ok(const SpinState &state, const DualGraph &dual) {
    for (CubeId c = 0; c < dual.num_cubes(); c++) {
        int n = 0;
        for (PlaquetteId p : dual.plaquettes_of_cube(c)) {
            n += state.defect(p);
        }
        if (n & 1) {
            return false;
        }
    }
    return true;
}

std::vector<LoopComponent> loop_components(const SpinState &state, const DualGraph &dual) {
    const LatticeGeometry &geom = state.geometry();
    require_3d(geom, "loop components");
    if (!cube_parity_ok(state, dual)) {
        throw std::logic_error("defect set violates the cube parity invariant");
    }
    UnionFind uf(dual.num_cubes());
    const auto &defects = state.defects();
    for (PlaquetteId p = 0; p < geom.num_plaquettes(); p++) {
        if (defects[p]) {
            auto cubes = dual.cubes_of_plaquette(p);
            uf.unite(cubes[0], cubes[1]);
        }
    }
    std::vector<int32_t> slot(dual.num_cubes(), -1);
    std::vector<LoopComponent> comps;
    for (PlaquetteId p = 0; p < geom.num_plaquettes(); p++) {
        if (!defects[p]) {
            continue;
        }
        uint32_t root = uf.find(dual.cubes_of_plaquette(p)[0]);
        if (slot[root] < 0) {
            slot[root] = static_cast<int32_t>(comps.size());
            comps.push_back({});
        }
        LoopComponent &comp = comps[slot[root]];
        comp.length++;
        if (dual.crosses_seam(p)) {
            comp.homology ^= static_cast<uint8_t>(1u << dual.dual_link_axis(p));
        }
    }
    return comps;
}

int count_noncontractible_loops(const SpinState &state, const DualGraph &dual) {
    int n = 0;
    for (const auto &comp : loop_components(state, dual)) {
        n += comp.homology != 0;
    }
    return n;
}

int cycle_parity(const SpinState &state, int direction, uint32_t index) {
    int parity = 0;
    for (LinkId l : state.geometry().straight_cycle(direction, index)) {
        parity ^= static_cast<int>(state.spin_down(l));
    }
    return parity;
}

SectorReadout measure_sector(const SpinState &state) {
    const LatticeGeometry &geom = state.geometry();
    SectorReadout out;
    out.confidence = 1.0;
    uint32_t n = geom.num_cycles_per_direction();
    for (int d = 0; d < geom.dim(); d++) {
        uint32_t odd = 0;
        for (uint32_t i = 0; i < n; i++) {
            odd += static_cast<uint32_t>(cycle_parity(state, d, i));
        }
        uint32_t even = n - odd;
        out.parity[d] = odd > even ? 1 : 0;
        out.axis_confidence[d] = static_cast<double>(std::max(odd, even)) / n;
        out.confidence = std::min(out.confidence, out.axis_confidence[d]);
    }
    return out;
}

}  // namespace loopdyn
