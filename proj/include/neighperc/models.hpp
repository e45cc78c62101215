#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "neighperc/lattice.hpp"
#include "neighperc/rng.hpp"

namespace neighperc {

// Per-vertex outgoing-edge laws and samplers. Parameters are exact rationals
// so the oracle module can reproduce every probability without floating
// point; samplers consume them as doubles.

// Small exact rational with int64 parts, reduced, denominator > 0.
struct Rat {
    long long num = 0;
    long long den = 1;

    Rat() = default;
    Rat(long long n, long long d = 1) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rat: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }
    friend bool operator<(Rat a, Rat b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator<=(Rat a, Rat b) { return a == b || a < b; }
    std::string str() const;
};

Rat parse_rat(const std::string& text);  // "3/20", "0.15" (decimal), or "7"

Rat rat_add(Rat a, Rat b);
Rat rat_sub(Rat a, Rat b);
Rat rat_mul(Rat a, Rat b);

// Direction indexing for general dimension d: directions 0..d-1 are +e_1..+e_d
// and d..2d-1 are -e_1..-e_d. For d=2 this is E,N,W,S, matching Dir.
struct ModelSpec {
    enum class Family { KNeighbor, IidDirected, AllOrNone, NsEw, Corner, IsoDegreeTwo };

    Family family = Family::KNeighbor;
    int dim = 2;
    Rat p;  // edge-level parameter; holds rho for IsoDegreeTwo

    static ModelSpec k_neighbor(int d, Rat p);
    // The planar degree-(2+eps) model: d=2, p = 1/2 + eps/4.
    static ModelSpec two_eps(Rat eps);
    static ModelSpec iid(Rat p, int d = 2);
    static ModelSpec all_or_none(Rat p, int d = 2);
    static ModelSpec ns_ew(Rat p);
    static ModelSpec corner(Rat p);
    static ModelSpec iso_degree_two(Rat rho);

    int degree_slots() const { return 2 * dim; }
    // floor(2*d*p) and the fractional remainder, the (k, eps) parametrization.
    int stage_k() const;
    Rat stage_eps() const;
    std::string name() const;
};

// Outgoing-edge indicator of one vertex, bit i = direction i open.
using VertexOutcome = std::uint32_t;

inline bool outcome_has(VertexOutcome m, int dir) { return (m >> dir) & 1u; }
inline int outcome_degree(VertexOutcome m) { return __builtin_popcount(m); }

// Full support of the per-vertex law with exact masses summing to 1.
struct OutcomeMass {
    VertexOutcome outcome;
    Rat mass;
};
std::vector<OutcomeMass> vertex_outcome_distribution(const ModelSpec& spec);

// Probability that one fixed directed edge is open, by summation over the
// distribution (direction 0; every family here is isotropic).
Rat edge_marginal(const ModelSpec& spec);

// Draws one vertex outcome from `stream`. The draw schedule per family is
// fixed and documented in the README; identical streams give identical
// outcomes on every platform.
VertexOutcome sample_vertex_outcome(const ModelSpec& spec, SplitMix64& stream);

// A fully sampled window: one outcome per vertex, row-major storage. The
// vertex at (x,y) uses the substream derive(seed, kStreamVertex, rank(x,y)).
struct Configuration {
    Window window;
    ModelSpec spec;
    std::uint64_t seed = 0;
    std::vector<VertexOutcome> outcomes;

    VertexOutcome outcome_at(PrimalVertex v) const {
        return outcomes[static_cast<std::size_t>(window.rank(v.x, v.y))];
    }
    bool open(const DirectedPrimalEdge& e) const {
        return outcome_has(outcome_at(e.tail), static_cast<int>(e.dir));
    }
    // Dual state: a dual edge is open iff its primal edge is closed.
    bool dual_open(const DirectedDualEdge& e) const { return !open(dual_to_primal(e)); }

    // Debug text grid: one line per row (top row = largest y), one 4-char
    // "ENWS" mask per vertex, '-' for a closed direction.
    std::string debug_text() const;
};

Configuration sample_configuration(const ModelSpec& spec, const Window& window,
                                   std::uint64_t seed);

// Test helper: build a configuration from explicit masks (row-major).
Configuration configuration_from_masks(const ModelSpec& spec, const Window& window,
                                       std::vector<VertexOutcome> masks);

// Monotone coupling of two KNeighbor laws with the same dimension and
// p_lo <= p_hi: both share the per-vertex (permutation, uniform) randomness,
// so the low open set is contained in the high one pathwise.
std::pair<Configuration, Configuration> sample_coupled_monotone(const ModelSpec& lo,
                                                                const ModelSpec& hi,
                                                                const Window& window,
                                                                std::uint64_t seed);

// AllOrNone as site percolation: a vertex is open iff all 2d out-directions
// are set.
std::vector<std::uint8_t> aon_to_site(const Configuration& config);

// Exploration coupling between iid directed percolation and undirected bond
// percolation inside a window. Each undirected edge's state is copied from
// exactly one of its two directional uniforms, chosen by a breadth-first
// counter-clockwise exploration of the forward set of the window center.
struct IidUndirectedCoupling {
    Window window;
    // Directed layer: open flag per (vertex rank, direction).
    std::vector<std::uint8_t> directed_open;
    // Undirected layer: open flag per undirected edge, keyed by the canonical
    // directed representative (tail = lexicographically smaller endpoint).
    std::vector<std::uint8_t> undirected_open;  // index: rank*2 + (0=E,1=N)
    // Which uniform the edge copied: 0 = canonical direction by the default
    // rule, 1 = canonical direction revealed by the exploration, 2 = reverse
    // direction revealed by the exploration.
    std::vector<std::uint8_t> consulted;  // same indexing
    std::vector<PrimalVertex> forward_set;   // directed forward set of center
    std::vector<PrimalVertex> cluster;       // undirected cluster of center

    bool undirected(int x, int y, bool vertical) const {
        return undirected_open[window.rank(x, y) * 2 + (vertical ? 1 : 0)] != 0;
    }
};

IidUndirectedCoupling couple_iid_directed_undirected(Rat p, const Window& window,
                                                     std::uint64_t seed);

}  // namespace neighperc
