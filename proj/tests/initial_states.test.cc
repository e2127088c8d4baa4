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

#include <gtest/gtest.h>

#include <cmath>

#include "loopdyn/observables.h"
#include "test_util.h"

using namespace loopdyn;

TEST(initial_states, names_round_trip) {
    for (auto k : {InitialKind::all_up, InitialKind::random, InitialKind::sector, InitialKind::square_membrane,
                   InitialKind::half_plane_membrane, InitialKind::defect_pair}) {
        EXPECT_EQ(initial_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(initial_kind_from_string("hot"), std::invalid_argument);
}

TEST(initial_states, validation) {
    auto g2 = build_geometry(2, 6);
    auto g3 = build_geometry(3, 7);
    InitialStateSpec spec{InitialKind::square_membrane};
    spec.r0 = 3;
    EXPECT_THROW(spec.validate(*g2), std::invalid_argument);
    EXPECT_NO_THROW(spec.validate(*g3));
    spec.r0 = 7;
    EXPECT_THROW(spec.validate(*g3), std::invalid_argument);
    EXPECT_THROW(InitialStateSpec{InitialKind::half_plane_membrane}.validate(*g3), std::invalid_argument);
    InitialStateSpec sector{InitialKind::sector};
    sector.parity = {0, 0, 1};
    EXPECT_THROW(sector.validate(*g2), std::invalid_argument);
    sector.parity = {2, 0, 0};
    EXPECT_THROW(sector.validate(*g3), std::invalid_argument);
    InitialStateSpec pair{InitialKind::defect_pair};
    EXPECT_THROW(pair.validate(*g3), std::invalid_argument);
    pair.separation = 6;
    EXPECT_THROW(pair.validate(*g2), std::invalid_argument);
}

TEST(initial_states, square_membrane) {
    auto g = build_geometry(3, 12);
    auto rng = testutil::test_rng();
    for (int r0 : {1, 4, 7}) {
        InitialStateSpec spec{InitialKind::square_membrane};
        spec.r0 = r0;
        auto s = make_initial(g, spec, rng);
        EXPECT_EQ(s.defect_count(), 4 * r0);
        DualGraph dual(*g);
        auto comps = loop_components(s, dual);
        ASSERT_EQ(comps.size(), 1u);
        EXPECT_EQ(comps[0].homology, 0);
        // The loop lies in the plane z = L/2 around the flipped links.
        for (PlaquetteId p = 0; p < g->num_plaquettes(); p++) {
            if (s.defect(p)) {
                EXPECT_EQ(g->site_coord(g->plaquette_site(p))[2], 6);
                EXPECT_NE(g->plaquette_plane(p), g->plane_of(0, 1));
            }
        }
    }
}

TEST(initial_states, half_plane_membrane) {
    auto g = build_geometry(3, 6);
    auto rng = testutil::test_rng();
    auto s = make_initial(g, {InitialKind::half_plane_membrane}, rng);
    EXPECT_EQ(s.defect_count(), 12);
    EXPECT_EQ(count_noncontractible_loops(s, DualGraph(*g)), 2);
}

TEST(initial_states, sector_has_no_defects) {
    auto g = build_geometry(3, 5);
    auto rng = testutil::test_rng();
    for (int bits = 0; bits < 8; bits++) {
        InitialStateSpec spec{InitialKind::sector};
        spec.parity = {bits & 1, (bits >> 1) & 1, (bits >> 2) & 1};
        auto s = make_initial(g, spec, rng);
        EXPECT_EQ(s.defect_count(), 0);
        EXPECT_EQ(measure_sector(s).parity, spec.parity);
    }
}

TEST(initial_states, defect_pair) {
    auto g = build_geometry(2, 8);
    auto rng = testutil::test_rng();
    InitialStateSpec spec{InitialKind::defect_pair};
    spec.separation = 3;
    auto s = make_initial(g, spec, rng);
    ASSERT_EQ(s.defect_count(), 2);
    std::vector<Coord> at;
    for (PlaquetteId p = 0; p < g->num_plaquettes(); p++) {
        if (s.defect(p)) {
            at.push_back(g->site_coord(g->plaquette_site(p)));
        }
    }
    EXPECT_EQ(at[0][1], at[1][1]);
    EXPECT_EQ(std::abs(at[0][0] - at[1][0]), 3);
}

TEST(initial_states, random_is_reproducible_and_balanced) {
    auto g = build_geometry(3, 10);
    auto r1 = Rng::for_stream(5, 0), r2 = Rng::for_stream(5, 0), r3 = Rng::for_stream(5, 1);
    auto a = make_initial(g, {InitialKind::random}, r1);
    auto b = make_initial(g, {InitialKind::random}, r2);
    auto c = make_initial(g, {InitialKind::random}, r3);
    EXPECT_EQ(a, b);
    EXPECT_FALSE(a == c);
    EXPECT_TRUE(a.consistent());
    // Plaquettes are iid fair coins in a uniform state.
    double rho = defect_density(a);
    EXPECT_NEAR(rho, 0.5, 5 * 0.5 / std::sqrt(3000.0));
    // Deterministic kinds leave the stream untouched.
    auto before = r1.state();
    make_initial(g, {InitialKind::all_up}, r1);
    EXPECT_EQ(r1.state(), before);
}
