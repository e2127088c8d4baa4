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

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "loopdyn/initial_states.h"
#include "test_util.h"

using namespace loopdyn;

namespace {

// Product of B_p over the a x b plaquettes spanned by a rectangle; equals W for any contractible
// rectangle.
int enclosed_flux(const SpinState &s, const Rectangle &r) {
    const auto &g = s.geometry();
    auto [u, v] = g.plane_axes(r.plane);
    int prod = 1;
    for (int i = 0; i < r.extent_a; i++) {
        for (int j = 0; j < r.extent_b; j++) {
            uint32_t site = g.shifted(g.shifted(r.origin, u, i), v, j);
            prod *= s.b_value(g.plaquette(site, r.plane));
        }
    }
    return prod;
}

}  // namespace

TEST(observables, rectangle_boundary_is_closed) {
    auto g = build_geometry(3, 7);
    Rectangle r{g->site_index({5, 6, 2}), g->plane_of(0, 2), 3, 4};
    auto links = rectangle_boundary(*g, r);
    EXPECT_EQ(links.size(), 14u);
    EXPECT_EQ(std::set<LinkId>(links.begin(), links.end()).size(), 14u);
    std::map<uint32_t, int> degree;
    for (auto l : links) {
        EXPECT_NE(g->link_direction(l), 1);
        degree[g->link_site(l)]++;
        degree[g->shifted(g->link_site(l), g->link_direction(l), 1)]++;
    }
    EXPECT_EQ(degree.size(), 14u);
    for (auto [site, d] : degree) {
        EXPECT_EQ(d, 2);
    }
    EXPECT_EQ(r.perimeter(), 14);
    EXPECT_EQ(r.area(), 12);
}

TEST(observables, rectangle_validation) {
    auto g = build_geometry(2, 5);
    EXPECT_THROW(validate_rectangle(*g, {0, 1, 1, 1}), std::invalid_argument);
    EXPECT_THROW(validate_rectangle(*g, {0, 0, 0, 1}), std::invalid_argument);
    EXPECT_THROW(validate_rectangle(*g, {0, 0, 2, 5}), std::invalid_argument);
    EXPECT_NO_THROW(validate_rectangle(*g, {0, 0, 4, 4}));
}

TEST(observables, wilson_equals_enclosed_flux) {
    auto rng = testutil::test_rng(1);
    for (int dim : {2, 3}) {
        auto g = build_geometry(dim, 6);
        for (int trial = 0; trial < 20; trial++) {
            auto s = testutil::random_flips(g, rng, 4 + trial);
            for (int plane = 0; plane < g->num_planes(); plane++) {
                for (int a = 1; a < 6; a++) {
                    for (int b = 1; b < 6; b++) {
                        Rectangle r{rng.below(g->num_vertices()), plane, a, b};
                        ASSERT_EQ(wilson_value(s, r), enclosed_flux(s, r));
                    }
                }
            }
        }
    }
}

TEST(observables, single_enclosed_defect) {
    auto g = build_geometry(2, 9);
    auto rng = testutil::test_rng();
    InitialStateSpec spec{InitialKind::defect_pair};
    spec.separation = 4;
    auto s = make_initial(g, spec, rng);
    ASSERT_EQ(s.defect_count(), 2);
    std::vector<uint32_t> defect_sites;
    for (PlaquetteId p = 0; p < g->num_plaquettes(); p++) {
        if (s.defect(p)) {
            defect_sites.push_back(g->plaquette_site(p));
        }
    }
    // A 3 x 3 loop centred on one defect encloses only that one.
    uint32_t corner = g->shifted(g->shifted(defect_sites[0], 0, -1), 1, -1);
    EXPECT_EQ(wilson_value(s, {corner, 0, 3, 3}), -1);
    // Around both defects, and around neither.
    EXPECT_EQ(wilson_value(s, {g->shifted(corner, 0, -1), 0, 8, 3}), 1);
    EXPECT_EQ(wilson_value(s, {g->shifted(corner, 1, 4), 0, 3, 3}), 1);
}

class SamplerShapes : public ::testing::TestWithParam<int> {};

TEST_P(SamplerShapes, sampler_matches_brute_force) {
    int dim = GetParam();
    auto g = build_geometry(dim, 7);
    std::vector<WilsonSpec> specs;
    for (int a = 1; a <= 4; a++) {
        for (int b = a; b <= 6; b++) {
            specs.push_back({a, b, {}, true});
        }
    }
    specs.push_back({2, 5, {0}, false});
    if (dim == 3) {
        specs.push_back({3, 1, {1, 2}, true});
    }
    WilsonSampler sampler(*g, specs);
    auto rng = testutil::test_rng(dim);
    for (int trial = 0; trial < 5; trial++) {
        auto s = testutil::random_flips(g, rng, 10 * trial);
        auto w = sampler.measure(s);
        ASSERT_EQ(w.size(), specs.size());
        for (size_t k = 0; k < specs.size(); k++) {
            EXPECT_DOUBLE_EQ(w[k], wilson_average_brute_force(s, specs[k])) << "spec " << k;
        }
    }
    EXPECT_EQ(sampler.placements(0), g->num_planes() * uint64_t{g->num_vertices()});
    EXPECT_EQ(sampler.placements(1), 2 * g->num_planes() * uint64_t{g->num_vertices()});
}

INSTANTIATE_TEST_SUITE_P(dims, SamplerShapes, ::testing::Values(2, 3));

TEST(observables, vacuum_values) {
    auto g = build_geometry(3, 5);
    SpinState s(g);
    WilsonSampler sampler(*g, {{1, 1}, {2, 3}});
    EXPECT_EQ(sampler.measure(s), (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(defect_density(s), 0.0);
    EXPECT_EQ(total_loop_length(s), 0);
    DualGraph dual(*g);
    EXPECT_TRUE(loop_components(s, dual).empty());
    EXPECT_THROW(total_loop_length(SpinState(build_geometry(2, 5))), std::invalid_argument);
}

TEST(observables, elementary_loop) {
    auto g = build_geometry(3, 4);
    SpinState s(g);
    s.flip_link(g->link(g->site_index({1, 2, 3}), 0));
    EXPECT_DOUBLE_EQ(defect_density(s), 4.0 / 192.0);
    EXPECT_EQ(total_loop_length(s), 4);
    DualGraph dual(*g);
    EXPECT_TRUE(cube_parity_ok(s, dual));
    auto comps = loop_components(s, dual);
    ASSERT_EQ(comps.size(), 1u);
    EXPECT_EQ(comps[0].length, 4u);
    EXPECT_EQ(comps[0].homology, 0);
    EXPECT_EQ(count_noncontractible_loops(s, dual), 0);
}

TEST(observables, straight_loops_have_winding) {
    auto g = build_geometry(3, 8);
    auto rng = testutil::test_rng();
    auto s = make_initial(g, {InitialKind::half_plane_membrane}, rng);
    DualGraph dual(*g);
    auto comps = loop_components(s, dual);
    ASSERT_EQ(comps.size(), 2u);
    for (const auto &c : comps) {
        EXPECT_EQ(c.length, 8u);
        EXPECT_EQ(c.homology, 0b010);
    }
    EXPECT_EQ(count_noncontractible_loops(s, dual), 2);
}

TEST(observables, random_state_components) {
    // Component lengths add up to the total loop length and winding classes combine to the
    // parity of seam crossings.
    auto g = build_geometry(3, 6);
    auto rng = testutil::test_rng(3);
    DualGraph dual(*g);
    for (int trial = 0; trial < 20; trial++) {
        auto s = make_initial(g, {InitialKind::random}, rng);
        ASSERT_TRUE(cube_parity_ok(s, dual));
        auto comps = loop_components(s, dual);
        uint64_t len = 0;
        uint8_t combined = 0;
        for (const auto &c : comps) {
            len += c.length;
            combined ^= c.homology;
        }
        EXPECT_EQ(static_cast<int64_t>(len), total_loop_length(s));
        uint8_t crossings = 0;
        for (int axis = 0; axis < 3; axis++) {
            int n = 0;
            for (auto p : dual.seam_plaquettes(axis)) {
                n += s.defect(p);
            }
            crossings |= static_cast<uint8_t>((n & 1) << axis);
        }
        EXPECT_EQ(combined, crossings);
    }
}

TEST(observables, gauge_invariance) {
    auto g = build_geometry(3, 5);
    auto rng = testutil::test_rng(4);
    InitialStateSpec spec{InitialKind::sector};
    spec.parity = {0, 1, 1};
    auto s = make_initial(g, spec, rng);
    for (int k = 0; k < 20; k++) {
        s.flip_link(rng.below(g->num_links()));
    }
    WilsonSampler sampler(*g, {{1, 2}, {3, 3}, {2, 4}});
    auto w = sampler.measure(s);
    auto sector = measure_sector(s);
    DualGraph dual(*g);
    auto comps = loop_components(s, dual);
    for (int k = 0; k < 200; k++) {
        s.apply_vertex(rng.below(g->num_vertices()));
    }
    EXPECT_EQ(sampler.measure(s), w);
    auto after = measure_sector(s);
    EXPECT_EQ(after.parity, sector.parity);
    EXPECT_EQ(after.axis_confidence, sector.axis_confidence);
    EXPECT_EQ(loop_components(s, dual).size(), comps.size());
}

TEST(observables, sector_readout) {
    auto g = build_geometry(3, 4);
    auto rng = testutil::test_rng();
    InitialStateSpec spec{InitialKind::sector};
    spec.parity = {1, 0, 1};
    auto s = make_initial(g, spec, rng);
    EXPECT_EQ(s.defect_count(), 0);
    auto r = measure_sector(s);
    EXPECT_EQ(r.parity, (std::array<int, 3>{1, 0, 1}));
    EXPECT_EQ(r.confidence, 1.0);
    for (uint32_t i = 0; i < g->num_cycles_per_direction(); i++) {
        EXPECT_EQ(cycle_parity(s, 0, i), 1);
        EXPECT_EQ(cycle_parity(s, 1, i), 0);
    }
    // One flipped x-link changes the parity of exactly one of the 16 x-cycles.
    s.flip_link(g->link(g->site_index({2, 1, 3}), 0));
    r = measure_sector(s);
    EXPECT_EQ(r.parity, (std::array<int, 3>{1, 0, 1}));
    EXPECT_EQ(r.axis_confidence[0], 1.0 - 1.0 / 16.0);
    EXPECT_EQ(r.axis_confidence[1], 1.0);
    EXPECT_EQ(r.confidence, 1.0 - 1.0 / 16.0);
}

TEST(observables, sector_ties_read_as_even) {
    auto g = build_geometry(2, 4);
    SpinState s(g);
    s.flip_link(g->link(g->site_index({0, 0, 0}), 0));
    s.flip_link(g->link(g->site_index({0, 1, 0}), 0));
    auto r = measure_sector(s);
    EXPECT_EQ(r.parity[0], 0);
    EXPECT_EQ(r.axis_confidence[0], 0.5);
    EXPECT_EQ(r.axis_confidence[1], 1.0);
    EXPECT_EQ(r.confidence, 0.5);
}
