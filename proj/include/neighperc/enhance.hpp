#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "neighperc/constrained.hpp"
#include "neighperc/stats.hpp"

namespace neighperc {

// Two-parameter enhanced bond model: plain edges open below level p, plus one
// diagonal edge per forbidden pattern, open below level q provided its
// pattern occurs. Connectivity keeps the pattern constraint on runs of plain
// edges; traversing a diagonal resets the constraint memory.

// Diagonal (q-layer) edge. `steep` false: {(a,b),(a+2,b+1)}, associated with
// the horizontal pattern anchored at (a,b); true: {(a,b),(a-1,b+2)},
// associated with the vertical pattern anchored at (a,b).
struct DiagonalEdge {
    DualVertex base;
    bool steep = false;

    DualVertex other() const {
        return steep ? DualVertex{base.a - 1, base.b + 2} : DualVertex{base.a + 2, base.b + 1};
    }
    PatternInstance pattern() const {
        return {steep ? PatternShape::Vertical : PatternShape::Horizontal, base};
    }
    friend bool operator==(const DiagonalEdge&, const DiagonalEdge&) = default;
};

struct EnhancedEdgeRef {
    enum class Kind { PEdge, QEdge };
    Kind kind = Kind::PEdge;
    UndirectedEdge pe;
    DiagonalEdge de;

    static EnhancedEdgeRef p_edge(UndirectedEdge e) { return {Kind::PEdge, e, {}}; }
    static EnhancedEdgeRef q_edge(DiagonalEdge d) { return {Kind::QEdge, {}, d}; }
};

// Latent uniforms over the box of radius n around the origin. Open states
// derive from (p, q) thresholds; pivotality forces one uniform to 0 or 1.
struct EnhancedConfig {
    int n = 0;  // box radius; the window is centered at the origin
    Rat p, q;
    std::uint64_t seed = 0;
    Window window;
    std::vector<double> u_p;  // rank(x,y)*2 + vertical
    std::vector<double> u_q;  // rank(a,b)*2 + steep

    double up(const UndirectedEdge& e) const {
        return u_p[static_cast<std::size_t>(window.rank(e.x, e.y)) * 2 + (e.vertical ? 1 : 0)];
    }
    double uq(const DiagonalEdge& d) const {
        return u_q[static_cast<std::size_t>(window.rank(d.base.a, d.base.b)) * 2 +
                   (d.steep ? 1 : 0)];
    }
    bool p_edge_exists(const UndirectedEdge& e) const {
        return window.contains(e.x, e.y) &&
               window.contains(e.x + (e.vertical ? 0 : 1), e.y + (e.vertical ? 1 : 0));
    }
};

EnhancedConfig enhanced_sample(Rat p, Rat q, int n, std::uint64_t seed);

// Test helper: uniforms chosen so that exactly the listed p-edges are open
// (u=0) and others closed (u=1); q-edge uniforms 0 for the listed diagonals.
EnhancedConfig enhanced_fixture(int n, const std::vector<UndirectedEdge>& open_p,
                                const std::vector<DiagonalEdge>& willing_q, Rat p = Rat(1, 2),
                                Rat q = Rat(1, 2));

struct ForcedEdge {
    EnhancedEdgeRef edge;
    double u = 0.0;  // 0 forces open (for q: open iff its pattern occurs), 1 forces closed
};

// Whether the derived graph at (p,q) is open on a given p-edge / q-edge.
bool p_edge_open(const EnhancedConfig& c, Rat p, const UndirectedEdge& e,
                 const std::optional<ForcedEdge>& forced);
bool q_edge_open(const EnhancedConfig& c, Rat p, Rat q, int n, const DiagonalEdge& d,
                 const std::optional<ForcedEdge>& forced);

// Event: origin connected to the sphere of radius n without traversing a
// whole pattern. Plain edges need one endpoint strictly inside the box,
// diagonals need both. Requires n <= c.n.
bool enhanced_connect(const EnhancedConfig& c, int n);
bool enhanced_connect_at(const EnhancedConfig& c, Rat p, Rat q, int n,
                         const std::optional<ForcedEdge>& forced);

struct PivotalReport {
    EnhancedEdgeRef edge;
    bool with_open = false;
    bool with_closed = false;
    bool pivotal = false;
};

PivotalReport is_pivotal_enhanced(const EnhancedConfig& c, const EnhancedEdgeRef& edge, int n);

// Edge universes of the event at radius n.
std::vector<UndirectedEdge> p_edges_in(int n);
std::vector<DiagonalEdge> q_edges_in(int n);

Estimate theta_n(Rat p, Rat q, int n, long long trials, std::uint64_t seed);

// Monte Carlo means of the pivotal-edge counts over the two edge universes;
// unbiased for the two partial derivatives of theta_n. Guarded to n <= 16.
std::pair<Estimate, Estimate> russo_estimates(Rat p, Rat q, int n, long long trials,
                                              std::uint64_t seed);

// Central finite differences of theta_n with common random numbers across
// p +/- h (or q +/- h when `in_q`).
Estimate theta_finite_difference(Rat p, Rat q, int n, Rat h, bool in_q, long long trials,
                                 std::uint64_t seed);

// Counts pathwise violations of event monotonicity over all componentwise
// comparable pairs in the grid, sharing one uniform field per trial.
long long monotone_event_check(int n, std::uint64_t seed,
                               const std::vector<std::pair<Rat, Rat>>& grid, long long trials);

}  // namespace neighperc
