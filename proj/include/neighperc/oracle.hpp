#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>

#include "neighperc/models.hpp"

namespace neighperc {

// Exact ground truth. Everything here is computed in arbitrary-precision
// rational arithmetic; no floating point on the result paths.

using BigRat = boost::multiprecision::cpp_rational;

inline BigRat to_bigrat(Rat r) { return BigRat(r.num, r.den); }
std::string bigrat_str(const BigRat& r);

enum class SiblingStatus { Unexplored, RevealedOpen, RevealedClosed };

// The conditional law of the east-role dual edge of one unit square given
// the exploration status of the other three sides. A revealed-open dual
// sibling means the owning vertex's corresponding out-edge is closed, and
// vice versa.
struct ConditionalScenario {
    ModelSpec spec;
    SiblingStatus north = SiblingStatus::Unexplored;
    SiblingStatus west = SiblingStatus::Unexplored;
    SiblingStatus south = SiblingStatus::Unexplored;
};

// P(east dual edge open | conditioning), exact. Throws std::invalid_argument
// when the conditioning event has probability zero.
BigRat conditional_dual_probability(const ConditionalScenario& sc);

// Exact probability of a window event by full enumeration over the interior
// vertices' outcomes (the boundary ring cannot influence escape-type events;
// predicates must only read interior outcomes). Guarded to <= 1e8
// configurations (std::domain_error).
BigRat exhaustive_window_probability(const ModelSpec& spec, int radius,
                                     const std::function<bool(const Configuration&)>& predicate);

// Exact probability that the center's forward set reaches the boundary of
// the radius-`radius` box.
BigRat exhaustive_escape_probability(const ModelSpec& spec, int radius);

// Self-avoiding walk counts on the square lattice from the origin, by
// backtracking; guarded to n <= 20.
long long saw_count(int n);

// Independent recount: depth-first with memoization on the occupied shape
// relative to the walk head.
long long saw_count_memoized(int n);

// One term of the union-bound curve: c_n * p^n.
BigRat union_bound_term(Rat p, int n);

// Published upper bound for the planar connective constant, recorded as a
// documented constant.
inline double connective_constant_upper() { return 2.679192495; }

}  // namespace neighperc
