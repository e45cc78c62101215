#include <doctest.h>

#include <algorithm>
#include <map>

#include "neighperc/lattice.hpp"
#include "neighperc/rng.hpp"

using namespace neighperc;

TEST_CASE("primal to dual is the fixed rotation table") {
    // East edge of the square at (0,1) maps to the upward east side.
    DirectedDualEdge d = primal_to_dual({{0, 1}, Dir::E});
    CHECK(d.tail == DualVertex{0, 0});
    CHECK(d.dir == Dir::N);
    CHECK(d.head() == DualVertex{0, 1});

    // Rotation formula about the midpoint (1/2, 0).
    DirectedDualEdge d2 = primal_to_dual({{0, 0}, Dir::E});
    CHECK(d2.tail == DualVertex{0, -1});
    CHECK(d2.head() == DualVertex{0, 0});

    // The four images around one vertex form a ccw cycle.
    PrimalVertex z{3, -2};
    std::vector<DirectedDualEdge> cycle;
    for (int d3 = 0; d3 < 4; ++d3) cycle.push_back(primal_to_dual({z, static_cast<Dir>(d3)}));
    for (int i = 0; i < 4; ++i) CHECK(cycle[i].head() == cycle[(i + 1) % 4].tail);
}

TEST_CASE("dual to primal inverts the rotation") {
    CHECK(dual_to_primal({{0, 0}, Dir::N}) == DirectedPrimalEdge{{0, 1}, Dir::E});
    CHECK(dual_to_primal({{5, 2}, Dir::N}) == DirectedPrimalEdge{{5, 3}, Dir::E});

    for (int d = 0; d < 4; ++d) {
        DirectedPrimalEdge e{{0, 0}, static_cast<Dir>(d)};
        CHECK(dual_to_primal(primal_to_dual(e)) == e);
    }
}

TEST_CASE("duality is a bijection on a 10x10 block") {
    std::map<std::tuple<int, int, int>, int> seen;
    for (int x = 0; x < 10; ++x)
        for (int y = 0; y < 10; ++y)
            for (int d = 0; d < 4; ++d) {
                DirectedPrimalEdge e{{x, y}, static_cast<Dir>(d)};
                DirectedDualEdge de = primal_to_dual(e);
                CHECK(dual_to_primal(de) == e);
                ++seen[{de.tail.a, de.tail.b, static_cast<int>(de.dir)}];
            }
    for (const auto& [k, v] : seen) CHECK(v == 1);
    CHECK(seen.size() == 400);
}

TEST_CASE("square siblings rotate around the owning vertex") {
    DirectedDualEdge east = primal_to_dual({{0, 0}, Dir::E});
    SquareSiblings sib = square_siblings(east);

    // All four sides map back to out-edges of the same primal vertex.
    CHECK(owner(east) == PrimalVertex{0, 0});
    CHECK(owner(sib.north) == PrimalVertex{0, 0});
    CHECK(owner(sib.west) == PrimalVertex{0, 0});
    CHECK(owner(sib.south) == PrimalVertex{0, 0});
    CHECK(dual_to_primal(sib.north).dir == Dir::N);
    CHECK(dual_to_primal(sib.west).dir == Dir::W);
    CHECK(dual_to_primal(sib.south).dir == Dir::S);

    // The quadruple forms a ccw cycle and square_siblings permutes it
    // cyclically.
    CHECK(east.head() == sib.north.tail);
    CHECK(sib.north.head() == sib.west.tail);
    CHECK(sib.west.head() == sib.south.tail);
    CHECK(sib.south.head() == east.tail);
    SquareSiblings from_north = square_siblings(sib.north);
    CHECK(from_north.north == sib.west);
    CHECK(from_north.west == sib.south);
    CHECK(from_north.south == east);
}

namespace {

// Independent hole finder: complement components inside an enlarged box,
// classified by whether they touch the box border.
PointSet fill_reference(const PointSet& a) {
    int min_x = 1 << 20, max_x = -(1 << 20), min_y = 1 << 20, max_y = -(1 << 20);
    for (const auto& v : a) {
        min_x = std::min(min_x, v.a);
        max_x = std::max(max_x, v.a);
        min_y = std::min(min_y, v.b);
        max_y = std::max(max_y, v.b);
    }
    min_x -= 2;
    min_y -= 2;
    max_x += 2;
    max_y += 2;
    const int w = max_x - min_x + 1, h = max_y - min_y + 1;
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    auto idx = [&](int x, int y) {
        return static_cast<std::size_t>(y - min_y) * w + static_cast<std::size_t>(x - min_x);
    };
    int next = 0;
    std::vector<bool> touches;
    for (int y = min_y; y <= max_y; ++y)
        for (int x = min_x; x <= max_x; ++x) {
            if (a.count({x, y}) || label[idx(x, y)] != -1) continue;
            touches.push_back(false);
            std::vector<std::pair<int, int>> stack{{x, y}};
            label[idx(x, y)] = next;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                if (cx == min_x || cx == max_x || cy == min_y || cy == max_y)
                    touches[static_cast<std::size_t>(next)] = true;
                for (int d = 0; d < 4; ++d) {
                    int nx = cx + kDirDx[d], ny = cy + kDirDy[d];
                    if (nx < min_x || nx > max_x || ny < min_y || ny > max_y) continue;
                    if (a.count({nx, ny}) || label[idx(nx, ny)] != -1) continue;
                    label[idx(nx, ny)] = next;
                    stack.emplace_back(nx, ny);
                }
            }
            ++next;
        }
    PointSet out = a;
    for (int y = min_y; y <= max_y; ++y)
        for (int x = min_x; x <= max_x; ++x) {
            int l = label[idx(x, y)];
            if (l >= 0 && !touches[static_cast<std::size_t>(l)]) out.insert({x, y});
        }
    return out;
}

PointSet grow_random_cluster(std::uint64_t seed, int steps) {
    SplitMix64 g(seed);
    PointSet s{{0, 0}};
    DualVertex cur{0, 0};
    for (int i = 0; i < steps; ++i) {
        int d = static_cast<int>(g.below(4));
        cur = {cur.a + kDirDx[d], cur.b + kDirDy[d]};
        s.insert(cur);
    }
    return s;
}

bool l1_connected(const PointSet& s) {
    if (s.empty()) return false;
    PointSet seen;
    std::vector<DualVertex> stack{*s.begin()};
    seen.insert(*s.begin());
    while (!stack.empty()) {
        DualVertex v = stack.back();
        stack.pop_back();
        for (int d = 0; d < 4; ++d) {
            DualVertex h{v.a + kDirDx[d], v.b + kDirDy[d]};
            if (s.count(h) && seen.insert(h).second) stack.push_back(h);
        }
    }
    return seen.size() == s.size();
}

}  // namespace

TEST_CASE("fill adds exactly the holes") {
    CHECK(fill({{0, 0}}) == PointSet{{0, 0}});

    // 3x3 ring encloses its center.
    PointSet ring;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            if (x != 1 || y != 1) ring.insert({x, y});
    PointSet filled = fill(ring);
    CHECK(filled.size() == 9);
    CHECK(filled.count({1, 1}) == 1);

    // L-shaped tromino has no holes.
    PointSet tromino{{0, 0}, {1, 0}, {0, 1}};
    CHECK(fill(tromino) == tromino);

    CHECK_THROWS_AS(fill({}), std::invalid_argument);
}

TEST_CASE("fill matches the component-labeling reference on random clusters") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        PointSet a = grow_random_cluster(seed, 40);
        REQUIRE(l1_connected(a));
        PointSet f = fill(a);
        CHECK(f == fill_reference(a));
        for (const auto& v : a) CHECK(f.count(v) == 1);
        CHECK(fill(f) == f);       // idempotent
        CHECK(l1_connected(f));    // connectivity preserved
    }
}

TEST_CASE("winding classification") {
    DirectedDualEdge e1{{0, 1}, Dir::S};
    DirectedDualEdge e2{{0, 0}, Dir::E};
    DirectedDualEdge e3{{1, 0}, Dir::N};
    CHECK(winding_class(e1, e2, e3) == WindingClass::LeftWinding);
    // Left winding: one owning primal vertex.
    CHECK(owner(e1) == owner(e2));
    CHECK(owner(e2) == owner(e3));

    DirectedDualEdge r1{{1, 1}, Dir::S};
    DirectedDualEdge r2{{1, 0}, Dir::W};
    DirectedDualEdge r3{{0, 0}, Dir::N};
    CHECK(winding_class(r1, r2, r3) == WindingClass::RightWinding);
    // Right winding: three distinct owners.
    CHECK(!(owner(r1) == owner(r2)));
    CHECK(!(owner(r2) == owner(r3)));
    CHECK(!(owner(r1) == owner(r3)));

    DirectedDualEdge s1{{0, 0}, Dir::E};
    DirectedDualEdge s2{{1, 0}, Dir::E};
    DirectedDualEdge s3{{2, 0}, Dir::E};
    CHECK(winding_class(s1, s2, s3) == WindingClass::Neither);

    CHECK_THROWS_AS(winding_class(s1, s3, s2), std::invalid_argument);
}
