#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace neighperc {

// Planar lattice geometry: primal/dual coordinates, the directed-edge duality
// bijection, window membership, hole filling and winding classification.
//
// Dual vertices use integer coordinates under the fixed convention that the
// dual vertex (a,b) sits at the point (a+1/2, b+1/2); all arithmetic stays in
// integers.

enum class Dir : std::uint8_t { E = 0, N = 1, W = 2, S = 3 };

inline constexpr int kDirDx[4] = {1, 0, -1, 0};
inline constexpr int kDirDy[4] = {0, 1, 0, -1};
inline constexpr char kDirChar[4] = {'E', 'N', 'W', 'S'};

inline Dir rotate_ccw(Dir d) { return static_cast<Dir>((static_cast<int>(d) + 1) & 3); }
inline Dir rotate_cw(Dir d) { return static_cast<Dir>((static_cast<int>(d) + 3) & 3); }
inline Dir opposite(Dir d) { return static_cast<Dir>((static_cast<int>(d) + 2) & 3); }

struct PrimalVertex {
    int x = 0;
    int y = 0;
    friend bool operator==(PrimalVertex, PrimalVertex) = default;
};

struct DualVertex {
    int a = 0;
    int b = 0;
    friend bool operator==(DualVertex, DualVertex) = default;
};

struct DirectedPrimalEdge {
    PrimalVertex tail;
    Dir dir = Dir::E;
    PrimalVertex head() const {
        return {tail.x + kDirDx[static_cast<int>(dir)], tail.y + kDirDy[static_cast<int>(dir)]};
    }
    friend bool operator==(const DirectedPrimalEdge&, const DirectedPrimalEdge&) = default;
};

struct DirectedDualEdge {
    DualVertex tail;
    Dir dir = Dir::E;
    DualVertex head() const {
        return {tail.a + kDirDx[static_cast<int>(dir)], tail.b + kDirDy[static_cast<int>(dir)]};
    }
    friend bool operator==(const DirectedDualEdge&, const DirectedDualEdge&) = default;
};

struct PointHash {
    std::size_t operator()(PrimalVertex v) const {
        std::uint64_t k = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.x)) << 32) |
                          static_cast<std::uint32_t>(v.y);
        k *= 0x9E3779B97F4A7C15ull;
        return static_cast<std::size_t>(k ^ (k >> 29));
    }
    std::size_t operator()(DualVertex v) const { return (*this)(PrimalVertex{v.a, v.b}); }
};

struct DualEdgeHash {
    std::size_t operator()(const DirectedDualEdge& e) const {
        return PointHash{}(e.tail) * 4 + static_cast<std::size_t>(e.dir);
    }
};

// L-infinity window of radius `radius` around `center` ((2r+1)^2 vertices).
// The same struct serves primal and dual integer coordinates.
struct Window {
    int cx = 0;
    int cy = 0;
    int radius = 1;

    int side() const { return 2 * radius + 1; }
    long long vertex_count() const { return 1LL * side() * side(); }

    bool contains(int x, int y) const {
        return std::abs(x - cx) <= radius && std::abs(y - cy) <= radius;
    }
    bool contains(PrimalVertex v) const { return contains(v.x, v.y); }
    bool on_boundary(int x, int y) const {
        int d = std::max(std::abs(x - cx), std::abs(y - cy));
        return d == radius;
    }
    bool interior(int x, int y) const {
        return std::max(std::abs(x - cx), std::abs(y - cy)) < radius;
    }

    // Row-major rank: y slow, x fast.
    long long rank(int x, int y) const {
        return 1LL * (y - (cy - radius)) * side() + (x - (cx - radius));
    }

    // A dual vertex is "safe" when the 2x2 block of primal vertices owning its
    // four outgoing dual edges lies inside the (primal) window.
    bool dual_safe(DualVertex v) const {
        return v.a >= cx - radius && v.a + 1 <= cx + radius && v.b >= cy - radius &&
               v.b + 1 <= cy + radius;
    }
};

// Counter-clockwise rotation of a primal directed edge by pi/2 about its
// midpoint, expressed in integer dual coordinates. The four images of the
// out-edges of a primal vertex z form a ccw cycle around z.
inline DirectedDualEdge primal_to_dual(const DirectedPrimalEdge& e) {
    int x = e.tail.x, y = e.tail.y;
    switch (e.dir) {
        case Dir::E: return {{x, y - 1}, Dir::N};
        case Dir::N: return {{x, y}, Dir::W};
        case Dir::W: return {{x - 1, y}, Dir::S};
        case Dir::S: return {{x - 1, y - 1}, Dir::E};
    }
    throw std::logic_error("bad direction");
}

inline DirectedPrimalEdge dual_to_primal(const DirectedDualEdge& e) {
    int a = e.tail.a, b = e.tail.b;
    switch (e.dir) {
        case Dir::N: return {{a, b + 1}, Dir::E};
        case Dir::W: return {{a, b}, Dir::N};
        case Dir::S: return {{a + 1, b}, Dir::W};
        case Dir::E: return {{a + 1, b + 1}, Dir::S};
    }
    throw std::logic_error("bad direction");
}

// The primal vertex whose unit square the dual edge bounds.
inline PrimalVertex owner(const DirectedDualEdge& e) { return dual_to_primal(e).tail; }

// The other three sides of the owning unit square, obtained by rotating e* by
// pi/2, pi and 3pi/2 counter-clockwise about the owner. Named as if e* played
// the east role.
struct SquareSiblings {
    DirectedDualEdge north;
    DirectedDualEdge west;
    DirectedDualEdge south;
};

inline SquareSiblings square_siblings(const DirectedDualEdge& e) {
    DirectedPrimalEdge p = dual_to_primal(e);
    DirectedDualEdge n = primal_to_dual({p.tail, rotate_ccw(p.dir)});
    DirectedDualEdge w = primal_to_dual({p.tail, opposite(p.dir)});
    DirectedDualEdge s = primal_to_dual({p.tail, rotate_cw(p.dir)});
    return {n, w, s};
}

using PointSet = std::unordered_set<DualVertex, PointHash>;

// Fill(A): A together with its holes, i.e. the complement of the unbounded
// connected component of A^c. Computed by flood-filling the complement from
// outside a bounding box with margin 1. Input must be non-empty and
// l1-connected.
PointSet fill(const PointSet& a);

enum class WindingClass { LeftWinding, RightWinding, Neither };

// Classifies three consecutive directed dual edges. A left winding is two
// consecutive left turns (all three edges own the same primal vertex), a
// right winding two consecutive right turns (three distinct owners).
WindingClass winding_class(const DirectedDualEdge& e1, const DirectedDualEdge& e2,
                           const DirectedDualEdge& e3);

}  // namespace neighperc
