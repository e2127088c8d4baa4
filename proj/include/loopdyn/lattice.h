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

#ifndef LOOPDYN_LATTICE_H
#define LOOPDYN_LATTICE_H

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace loopdyn {

using LinkId = uint32_t;
using PlaquetteId = uint32_t;
using VertexId = uint32_t;
using CubeId = uint32_t;

/// Site coordinates; unused trailing entries are zero in 2d.
using Coord = std::array<int, 3>;

/// Incidence structure of a periodic square (d=2) or cubic (d=3) lattice with spins on links.
///
/// Indexing is site-major:
///   site   = x + L*y + L*L*z
///   link   = site*dim + direction            (link from site to site+e_direction)
///   plaq   = site*num_planes + plane         (plaquette spanned at site by the plane's two axes)
/// Planes are ordered (x,y), (x,z), (y,z). In 3d the plane with index k has normal axis 2-k.
///
/// The object is immutable after construction and may be shared freely between threads.
class LatticeGeometry {
   public:
    LatticeGeometry(int dim, int L);

    int dim() const { return dim_; }
    int L() const { return L_; }
    uint32_t num_links() const { return num_links_; }
    uint32_t num_plaquettes() const { return num_plaquettes_; }
    uint32_t num_vertices() const { return num_vertices_; }
    int num_planes() const { return num_planes_; }
    /// 2(dim-1): number of plaquettes sharing one link.
    int plaquettes_per_link() const { return plaquettes_per_link_; }

    uint32_t site_index(const Coord &c) const;
    Coord site_coord(uint32_t site) const;
    /// Site shifted by `delta` steps along `axis`, periodically.
    uint32_t shifted(uint32_t site, int axis, int delta) const;

    LinkId link(uint32_t site, int direction) const { return site * dim_ + direction; }
    uint32_t link_site(LinkId l) const { return l / dim_; }
    int link_direction(LinkId l) const { return static_cast<int>(l % dim_); }

    PlaquetteId plaquette(uint32_t site, int plane) const { return site * num_planes_ + plane; }
    uint32_t plaquette_site(PlaquetteId p) const { return p / num_planes_; }
    int plaquette_plane(PlaquetteId p) const { return static_cast<int>(p % num_planes_); }
    /// The two axes spanning `plane`, lowest first.
    std::array<int, 2> plane_axes(int plane) const;
    /// Index of the plane spanned by two distinct axes.
    int plane_of(int axis_a, int axis_b) const;
    /// Axis orthogonal to `plane` (3d only).
    int plane_normal(int plane) const;

    std::span<const PlaquetteId> plaquettes_of_link(LinkId l) const;
    std::span<const LinkId, 4> links_of_plaquette(PlaquetteId p) const;
    std::span<const LinkId> links_of_vertex(VertexId v) const;

    /// Flat link -> plaquette table, `plaquettes_per_link()` entries per link. Hot-path access.
    const PlaquetteId *link_plaquette_table() const { return link_plaquettes_.data(); }

    /// Number of straight non-contractible cycles per direction: L^(dim-1).
    uint32_t num_cycles_per_direction() const { return num_vertices_ / L_; }
    /// Links of the `index`-th straight cycle along `direction` (L links, all oriented along it).
    std::span<const LinkId> straight_cycle(int direction, uint32_t index) const;

   private:
    int dim_;
    int L_;
    int num_planes_;
    int plaquettes_per_link_;
    uint32_t num_links_;
    uint32_t num_plaquettes_;
    uint32_t num_vertices_;
    std::vector<PlaquetteId> link_plaquettes_;
    std::vector<LinkId> plaquette_links_;
    std::vector<LinkId> vertex_links_;
    std::vector<LinkId> cycles_;  // [direction][index][k]
};

/// Dual-lattice structure of a 3d lattice: cubes are dual vertices and every plaquette is the
/// dual link joining the two cubes it separates.
///
/// Cube ids coincide with the site id of the cube's lowest corner. The homology seam for axis i
/// is the plane between cube coordinate L-1 and 0 along i; a plaquette with normal i crosses
/// that seam iff its own coordinate along i is 0.
class DualGraph {
   public:
    explicit DualGraph(const LatticeGeometry &geom);

    uint32_t num_cubes() const { return static_cast<uint32_t>(cube_plaquettes_.size() / 6); }
    /// The two cubes separated by plaquette `p`: {cube below along the normal, cube above}.
    std::array<CubeId, 2> cubes_of_plaquette(PlaquetteId p) const {
        return {plaquette_cubes_[2 * p], plaquette_cubes_[2 * p + 1]};
    }
    std::span<const PlaquetteId, 6> plaquettes_of_cube(CubeId c) const {
        return std::span<const PlaquetteId, 6>(cube_plaquettes_.data() + 6 * static_cast<size_t>(c), 6);
    }
    /// Axis along which the dual link of `p` runs (the plaquette normal).
    int dual_link_axis(PlaquetteId p) const { return dual_axis_[p]; }
    /// True iff the dual link of `p` crosses the seam of its own axis.
    bool crosses_seam(PlaquetteId p) const { return seam_[p] != 0; }
    /// All plaquettes whose dual link crosses the seam perpendicular to `axis`.
    std::span<const PlaquetteId> seam_plaquettes(int axis) const { return seam_sets_[axis]; }

   private:
    std::vector<CubeId> plaquette_cubes_;
    std::vector<PlaquetteId> cube_plaquettes_;
    std::vector<uint8_t> dual_axis_;
    std::vector<uint8_t> seam_;
    std::array<std::vector<PlaquetteId>, 3> seam_sets_;
};

/// Builds and validates a geometry. Throws std::invalid_argument for dim outside {2,3} or L < 3.
std::shared_ptr<const LatticeGeometry> build_geometry(int dim, int L);

}  // namespace loopdyn

#endif
