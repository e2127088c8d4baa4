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

#include "loopdyn/lattice.h"

#include <stdexcept>
#include <string>

namespace loopdyn {

namespace {

constexpr std::array<std::array<int, 2>, 3> kPlaneAxes{{{0, 1}, {0, 2}, {1, 2}}};

void check_id(uint32_t id, uint32_t bound, const char *what) {
    if (id >= bound) {
        throw std::out_of_range(std::string(what) + " id " + std::to_string(id) + " out of range [0, " +
                                std::to_string(bound) + ")");
    }
}

}  // namespace

LatticeGeometry::LatticeGeometry(int dim, int L) : dim_(dim), L_(L) {
    if (dim != 2 && dim != 3) {
        throw std::invalid_argument("lattice dimension must be 2 or 3, got " + std::to_string(dim));
    }
    if (L < 3) {
        throw std::invalid_argument("lattice size L must be at least 3, got " + std::to_string(L));
    }
    num_planes_ = dim == 2 ? 1 : 3;
    plaquettes_per_link_ = 2 * (dim - 1);
    num_vertices_ = 1;
    for (int k = 0; k < dim; k++) {
        num_vertices_ *= static_cast<uint32_t>(L);
    }
    num_links_ = num_vertices_ * dim;
    num_plaquettes_ = num_vertices_ * num_planes_;

    plaquette_links_.resize(4 * static_cast<size_t>(num_plaquettes_));
    link_plaquettes_.assign(static_cast<size_t>(plaquettes_per_link_) * num_links_, 0);
    std::vector<int> fill(num_links_, 0);
    for (uint32_t s = 0; s < num_vertices_; s++) {
        for (int plane = 0; plane < num_planes_; plane++) {
            auto [a, b] = kPlaneAxes[plane];
            PlaquetteId p = plaquette(s, plane);
            LinkId *out = &plaquette_links_[4 * static_cast<size_t>(p)];
            out[0] = link(s, a);
            out[1] = link(shifted(s, a, 1), b);
            out[2] = link(shifted(s, b, 1), a);
            out[3] = link(s, b);
            for (int k = 0; k < 4; k++) {
                LinkId l = out[k];
                link_plaquettes_[static_cast<size_t>(plaquettes_per_link_) * l + fill[l]++] = p;
            }
        }
    }
    for (uint32_t l = 0; l < num_links_; l++) {
        if (fill[l] != plaquettes_per_link_) {
            throw std::logic_error("link incidence count mismatch");
        }
    }

    vertex_links_.resize(2 * static_cast<size_t>(dim) * num_vertices_);
    for (uint32_t s = 0; s < num_vertices_; s++) {
        for (int d = 0; d < dim; d++) {
            vertex_links_[2 * dim * s + 2 * d] = link(s, d);
            vertex_links_[2 * dim * s + 2 * d + 1] = link(shifted(s, d, -1), d);
        }
    }

    uint32_t per_dir = num_vertices_ / L;
    cycles_.resize(static_cast<size_t>(dim) * per_dir * L);
    for (int d = 0; d < dim; d++) {
        uint32_t index = 0;
        for (uint32_t s = 0; s < num_vertices_; s++) {
            if (site_coord(s)[d] != 0) {
                continue;
            }
            LinkId *out = &cycles_[(static_cast<size_t>(d) * per_dir + index) * L];
            uint32_t cur = s;
            for (int k = 0; k < L; k++) {
                out[k] = link(cur, d);
                cur = shifted(cur, d, 1);
            }
            index++;
        }
    }
}

uint32_t LatticeGeometry::site_index(const Coord &c) const {
    uint32_t index = 0;
    uint32_t stride = 1;
    for (int k = 0; k < dim_; k++) {
        int v = ((c[k] % L_) + L_) % L_;
        index += stride * static_cast<uint32_t>(v);
        stride *= static_cast<uint32_t>(L_);
    }
    return index;
}

Coord LatticeGeometry::site_coord(uint32_t site) const {
    Coord c{0, 0, 0};
    for (int k = 0; k < dim_; k++) {
        c[k] = static_cast<int>(site % L_);
        site /= L_;
    }
    return c;
}

uint32_t LatticeGeometry::shifted(uint32_t site, int axis, int delta) const {
    Coord c = site_coord(site);
    c[axis] += delta;
    return site_index(c);
}

std::array<int, 2> LatticeGeometry::plane_axes(int plane) const {
    if (plane < 0 || plane >= num_planes_) {
        throw std::out_of_range("plane index out of range");
    }
    return kPlaneAxes[plane];
}

int LatticeGeometry::plane_of(int axis_a, int axis_b) const {
    if (axis_a > axis_b) {
        std::swap(axis_a, axis_b);
    }
    for (int plane = 0; plane < num_planes_; plane++) {
        if (kPlaneAxes[plane][0] == axis_a && kPlaneAxes[plane][1] == axis_b) {
            return plane;
        }
    }
    throw std::invalid_argument("axes do not span a lattice plane");
}

int LatticeGeometry::plane_normal(int plane) const {
    if (dim_ != 3) {
        throw std::logic_error("plane normal is only defined in 3d");
    }
    auto [a, b] = plane_axes(plane);
    return 3 - a - b;
}

std::span<const PlaquetteId> LatticeGeometry::plaquettes_of_link(LinkId l) const {
    check_id(l, num_links_, "link");
    return {link_plaquettes_.data() + static_cast<size_t>(plaquettes_per_link_) * l,
            static_cast<size_t>(plaquettes_per_link_)};
}

std::span<const LinkId, 4> LatticeGeometry::links_of_plaquette(PlaquetteId p) const {
    check_id(p, num_plaquettes_, "plaquette");
    return std::span<const LinkId, 4>(plaquette_links_.data() + 4 * static_cast<size_t>(p), 4);
}

std::span<const LinkId> LatticeGeometry::links_of_vertex(VertexId v) const {
    check_id(v, num_vertices_, "vertex");
    return {vertex_links_.data() + 2 * static_cast<size_t>(dim_) * v, 2 * static_cast<size_t>(dim_)};
}

std::span<const LinkId> LatticeGeometry::straight_cycle(int direction, uint32_t index) const {
    if (direction < 0 || direction >= dim_) {
        throw std::out_of_range("cycle direction out of range");
    }
    check_id(index, num_cycles_per_direction(), "cycle");
    return {cycles_.data() + (static_cast<size_t>(direction) * num_cycles_per_direction() + index) * L_,
            static_cast<size_t>(L_)};
}

DualGraph::DualGraph(const LatticeGeometry &geom) {
    if (geom.dim() != 3) {
        throw std::invalid_argument("dual graph of loop defects requires a 3d lattice");
    }
    uint32_t n_cubes = geom.num_vertices();
    uint32_t n_plaq = geom.num_plaquettes();
    plaquette_cubes_.resize(2 * static_cast<size_t>(n_plaq));
    cube_plaquettes_.resize(6 * static_cast<size_t>(n_cubes));
    dual_axis_.resize(n_plaq);
    seam_.resize(n_plaq);
    for (PlaquetteId p = 0; p < n_plaq; p++) {
        uint32_t s = geom.plaquette_site(p);
        int normal = geom.plane_normal(geom.plaquette_plane(p));
        plaquette_cubes_[2 * p] = geom.shifted(s, normal, -1);
        plaquette_cubes_[2 * p + 1] = s;
        dual_axis_[p] = static_cast<uint8_t>(normal);
        seam_[p] = geom.site_coord(s)[normal] == 0 ? 1 : 0;
        if (seam_[p]) {
            seam_sets_[normal].push_back(p);
        }
    }
    for (CubeId c = 0; c < n_cubes; c++) {
        for (int normal = 0; normal < 3; normal++) {
            auto axes = normal == 0 ? std::array<int, 2>{1, 2} : normal == 1 ? std::array<int, 2>{0, 2}
                                                                             : std::array<int, 2>{0, 1};
            int plane = geom.plane_of(axes[0], axes[1]);
            cube_plaquettes_[6 * static_cast<size_t>(c) + 2 * normal] = geom.plaquette(c, plane);
            cube_plaquettes_[6 * static_cast<size_t>(c) + 2 * normal + 1] =
                geom.plaquette(geom.shifted(c, normal, 1), plane);
        }
    }
}

std::shared_ptr<const LatticeGeometry> build_geometry(int dim, int L) {
    return std::make_shared<const LatticeGeometry>(dim, L);
}

}  // namespace loopdyn
