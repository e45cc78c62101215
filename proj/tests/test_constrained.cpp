#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "neighperc/constrained.hpp"

using namespace neighperc;

namespace {

void open_path(BondConfig& c, const std::vector<DualVertex>& vs) {
    for (std::size_t i = 0; i + 1 < vs.size(); ++i)
        c.set_open(undirected_between(vs[i], vs[i + 1]), true);
}

// Trail of the base horizontal pattern at (0,0) plus one exit edge to the
// radius-3 sphere; the designated closed edges stay closed.
BondConfig corridor_fixture() {
    BondConfig c = empty_bond({0, 0, 6});
    PatternInstance inst{PatternShape::Horizontal, {0, 0}};
    auto v = inst.trail_vertices();
    open_path(c, {v.begin(), v.end()});
    c.set_open(undirected_between({2, 1}, {3, 1}), true);
    return c;
}

}  // namespace

TEST_CASE("pattern geometry matches the two base shapes") {
    PatternInstance h{PatternShape::Horizontal, {0, 0}};
    auto hv = h.trail_vertices();
    CHECK(hv == std::array<DualVertex, 6>{{{0, 0}, {0, 1}, {1, 1}, {1, 0}, {2, 0}, {2, 1}}});
    auto hc = h.closed_edges();
    CHECK(hc[0] == undirected_between({0, 0}, {1, 0}));
    CHECK(hc[1] == undirected_between({1, 1}, {2, 1}));

    PatternInstance v{PatternShape::Vertical, {0, 0}};
    auto vv = v.trail_vertices();
    CHECK(vv == std::array<DualVertex, 6>{{{0, 0}, {-1, 0}, {-1, 1}, {0, 1}, {0, 2}, {-1, 2}}});
    auto vc = v.closed_edges();
    CHECK(vc[0] == undirected_between({0, 0}, {0, 1}));
    CHECK(vc[1] == undirected_between({-1, 1}, {-1, 2}));
}

TEST_CASE("pattern occurrence needs five open and two closed edges") {
    // All edges open: the designated closed edges never are.
    Window w{0, 0, 4};
    BondConfig all_open = sample_bond(Rat(1), w, 1);
    for (int x = -2; x <= 1; ++x)
        for (int y = -2; y <= 1; ++y) {
            CHECK_FALSE(pattern_occurs(all_open, {PatternShape::Horizontal, {x, y}}));
            if (x >= -1 && y <= 0)
                CHECK_FALSE(pattern_occurs(all_open, {PatternShape::Vertical, {x, y}}));
        }

    BondConfig c = corridor_fixture();
    CHECK(pattern_occurs(c, {PatternShape::Horizontal, {0, 0}}));
    c.set_open(undirected_between({0, 0}, {0, 1}), false);  // drop one trail edge
    CHECK_FALSE(pattern_occurs(c, {PatternShape::Horizontal, {0, 0}}));

    CHECK_THROWS_AS(pattern_occurs(c, {PatternShape::Horizontal, {6, 6}}),
                    std::invalid_argument);
}

TEST_CASE("path pattern usage distinguishes full traversal from touching") {
    BondConfig c = corridor_fixture();
    // Side route sharing the first two trail edges but leaving the pattern.
    open_path(c, {{1, 1}, {1, 2}, {2, 2}, {3, 2}});

    std::vector<DualVertex> through = {{0, 0}, {0, 1}, {1, 1}, {1, 0}, {2, 0}, {2, 1}, {3, 1}};
    CHECK(path_uses_pattern(through, c));

    std::vector<DualVertex> around = {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {3, 2}};
    CHECK_FALSE(path_uses_pattern(around, c));

    std::vector<DualVertex> reversed(through.rbegin(), through.rend());
    CHECK(path_uses_pattern(reversed, c));  // traversal direction is irrelevant

    std::vector<DualVertex> brief = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    CHECK_FALSE(path_uses_pattern(brief, c));  // fewer than five edges

    std::vector<DualVertex> not_open = {{0, 0}, {1, 0}};
    CHECK_THROWS_AS(path_uses_pattern(not_open, c), std::invalid_argument);
}

TEST_CASE("pattern window matching identifies both shapes") {
    PatternInstance h{PatternShape::Horizontal, {3, -2}};
    auto he = h.trail_edges();
    auto matched = match_pattern_window(he);
    REQUIRE(matched.has_value());
    CHECK(matched->shape == PatternShape::Horizontal);
    CHECK(matched->anchor == DualVertex{3, -2});

    PatternInstance v{PatternShape::Vertical, {-1, 2}};
    auto ve = v.trail_edges();
    std::reverse(ve.begin(), ve.end());
    auto matched2 = match_pattern_window(ve);
    REQUIRE(matched2.has_value());
    CHECK(matched2->shape == PatternShape::Vertical);
    CHECK(matched2->anchor == DualVertex{-1, 2});

    // A straight run of five edges matches nothing.
    std::array<UndirectedEdge, 5> straight;
    for (int i = 0; i < 5; ++i) straight[static_cast<std::size_t>(i)] = {i, 0, false};
    CHECK_FALSE(match_pattern_window(straight).has_value());
}

TEST_CASE("constrained connectivity on fixtures") {
    // Everything open: no pattern can occur, the search is unconstrained.
    BondConfig all_open = sample_bond(Rat(1), {0, 0, 5}, 1);
    auto found = constrained_connect(all_open, {0, 0}, 3);
    REQUIRE(found.has_value());
    CHECK_FALSE(path_uses_pattern(*found, all_open));

    // Corridor: the only route to the sphere traverses the whole pattern.
    BondConfig corridor = corridor_fixture();
    CHECK(unconstrained_connect(corridor, {0, 0}, 3));
    CHECK_FALSE(constrained_connect(corridor, {0, 0}, 3).has_value());
    CHECK_FALSE(constrained_connect_by_enumeration(corridor, {0, 0}, 3));

    // Adding a bypass restores admissible connectivity.
    BondConfig bypass = corridor_fixture();
    open_path(bypass, {{1, 1}, {1, 2}, {2, 2}, {3, 2}});
    auto found2 = constrained_connect(bypass, {0, 0}, 3);
    REQUIRE(found2.has_value());
    CHECK_FALSE(path_uses_pattern(*found2, bypass));
    CHECK(constrained_connect_by_enumeration(bypass, {0, 0}, 3));
}

TEST_CASE("memory search agrees with simple path enumeration on small windows") {
    // Shared-sample relaxation inequality comes along for free.
    for (Rat q : {Rat(3, 10), Rat(1, 2), Rat(7, 10)}) {
        long long found_count = 0, unconstrained_count = 0;
        for (std::uint64_t seed = 0; seed < 2500; ++seed) {
            BondConfig c = sample_bond(q, {0, 0, 3}, derive(777, seed));
            auto got = constrained_connect(c, {0, 0}, 2);
            bool oracle = constrained_connect_by_enumeration(c, {0, 0}, 2);
            REQUIRE(got.has_value() == oracle);
            if (got) {
                CHECK_FALSE(path_uses_pattern(*got, c));
                CHECK(unconstrained_connect(c, {0, 0}, 2));
                ++found_count;
            }
            if (unconstrained_connect(c, {0, 0}, 2)) ++unconstrained_count;
        }
        CHECK(found_count <= unconstrained_count);
    }
}

TEST_CASE("bond sampling is reproducible with the advertised marginal") {
    Window w{0, 0, 10};
    BondConfig a = sample_bond(Rat(1, 2), w, 5);
    BondConfig b = sample_bond(Rat(1, 2), w, 5);
    CHECK(a.open_edges == b.open_edges);

    BondConfig zero = sample_bond(Rat(0), w, 6);
    CHECK(std::count(zero.open_edges.begin(), zero.open_edges.end(), 1) == 0);

    // 4-sigma binomial band at q = 1/2 over ~1e6 edges.
    long long open_count = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 1200; ++seed) {
        BondConfig c = sample_bond(Rat(1, 2), {0, 0, 10}, derive(4242, seed));
        for (long long r = 0; r < c.window.vertex_count(); ++r)
            for (int k = 0; k < 2; ++k) {
                UndirectedEdge e{c.window.cx - c.window.radius + static_cast<int>(r % c.window.side()),
                                 c.window.cy - c.window.radius + static_cast<int>(r / c.window.side()),
                                 k == 1};
                if (!c.edge_exists(e)) continue;
                ++total;
                open_count += c.open_edges[static_cast<std::size_t>(r) * 2 + k];
            }
    }
    double sigma = std::sqrt(0.25 * static_cast<double>(total));
    CHECK(std::abs(static_cast<double>(open_count) - 0.5 * static_cast<double>(total)) <=
          4.0 * sigma);
}
