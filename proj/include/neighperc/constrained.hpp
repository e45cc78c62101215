#pragma once

#include <array>
#include <optional>
#include <vector>

#include "neighperc/lattice.hpp"
#include "neighperc/models.hpp"

namespace neighperc {

// Undirected bond percolation on dual-integer coordinates with two forbidden
// five-open/two-closed patterns. Percolating paths may touch pattern edges;
// only traversing a whole pattern trail consecutively is forbidden.

struct UndirectedEdge {
    // Canonical form: (x,y) plus E or N step.
    int x = 0;
    int y = 0;
    bool vertical = false;
    friend bool operator==(const UndirectedEdge&, const UndirectedEdge&) = default;
    friend auto operator<=>(const UndirectedEdge&, const UndirectedEdge&) = default;
};

inline UndirectedEdge undirected_between(DualVertex u, DualVertex v) {
    if (u.a + 1 == v.a && u.b == v.b) return {u.a, u.b, false};
    if (v.a + 1 == u.a && v.b == u.b) return {v.a, v.b, false};
    if (u.a == v.a && u.b + 1 == v.b) return {u.a, u.b, true};
    if (u.a == v.a && v.b + 1 == u.b) return {v.a, v.b, true};
    throw std::invalid_argument("undirected_between: not adjacent");
}

struct BondConfig {
    Window window;  // dual-integer coordinates
    Rat q;
    std::uint64_t seed = 0;
    // Edge states keyed by canonical representative; index rank(x,y)*2 +
    // (vertical ? 1 : 0). Edges with an endpoint outside the window are
    // absent (treated closed).
    std::vector<std::uint8_t> open_edges;

    bool in_window(int x, int y) const { return window.contains(x, y); }
    bool edge_exists(const UndirectedEdge& e) const {
        return in_window(e.x, e.y) &&
               in_window(e.x + (e.vertical ? 0 : 1), e.y + (e.vertical ? 1 : 0));
    }
    bool open(const UndirectedEdge& e) const {
        if (!edge_exists(e)) return false;
        return open_edges[static_cast<std::size_t>(window.rank(e.x, e.y)) * 2 +
                          (e.vertical ? 1 : 0)] != 0;
    }
    void set_open(const UndirectedEdge& e, bool v) {
        open_edges[static_cast<std::size_t>(window.rank(e.x, e.y)) * 2 +
                   (e.vertical ? 1 : 0)] = v ? 1 : 0;
    }
};

BondConfig sample_bond(Rat q, const Window& window, std::uint64_t seed);
BondConfig empty_bond(const Window& window);  // all closed, for fixtures

enum class PatternShape { Horizontal, Vertical };

// One forbidden pattern instance: a five-edge open trail plus two designated
// closed edges. Horizontal is the base shape; Vertical is its ccw quarter
// turn about the anchor. Instances are these two shapes plus translations.
struct PatternInstance {
    PatternShape shape = PatternShape::Horizontal;
    DualVertex anchor;

    std::array<DualVertex, 6> trail_vertices() const;
    std::array<UndirectedEdge, 5> trail_edges() const;
    std::array<UndirectedEdge, 2> closed_edges() const;
};

// True iff all five trail edges are open and both designated edges closed.
bool pattern_occurs(const BondConfig& config, const PatternInstance& inst);

// True iff some window of five consecutive path edges covers a pattern
// instance's trail as an edge set (either traversal direction) while that
// instance's designated edges are closed. Throws if the path is not open.
bool path_uses_pattern(const std::vector<DualVertex>& path, const BondConfig& config);

// Given five consecutive walk edges (as canonical undirected edges), returns
// the pattern instance they traverse, if any.
std::optional<PatternInstance> match_pattern_window(const std::array<UndirectedEdge, 5>& window5);

// Getter-based variants so callers can evaluate patterns against an edge map
// with forced overrides. `open(e)` must return false for absent edges.
template <class OpenFn>
bool pattern_occurs_with(OpenFn&& open, const PatternInstance& inst) {
    for (const auto& e : inst.trail_edges())
        if (!open(e)) return false;
    for (const auto& e : inst.closed_edges())
        if (open(e)) return false;
    return true;
}

template <class OpenFn>
bool window_is_forbidden_with(OpenFn&& open, const std::array<UndirectedEdge, 5>& w) {
    auto inst = match_pattern_window(w);
    if (!inst) return false;
    for (const auto& e : inst->closed_edges())
        if (open(e)) return false;
    return true;
}

// Open path from source to the L-infinity sphere of radius n around it that
// never traverses a whole pattern. Search state is (vertex, last <= 4
// traversed edges); breadth-first over that state graph. Walks are locally
// self-avoiding over the tracked window (revisits further back are allowed);
// agreement with full simple-path enumeration is checked on small windows.
std::optional<std::vector<DualVertex>> constrained_connect(const BondConfig& config,
                                                           DualVertex source, int n);

// Unconstrained reachability, for the relaxation check.
bool unconstrained_connect(const BondConfig& config, DualVertex source, int n);

// Exhaustive oracle: enumerates simple open paths from source, pruning any
// prefix that traverses a pattern. Intended for small radii.
bool constrained_connect_by_enumeration(const BondConfig& config, DualVertex source, int n);

}  // namespace neighperc
