#pragma once

#include <functional>
#include <string>
#include <vector>

#include "neighperc/explore.hpp"
#include "neighperc/stats.hpp"

namespace neighperc {

// Monte Carlo engine. Every trial is a pure function of (inputs, trial index,
// master seed); trial outcomes are lazily sampled with the same per-vertex
// substreams as sample_configuration, so full-window sampling and the lazy
// path agree bit-exactly.

// Fraction of trials in which the forward set of the origin reaches the
// boundary of the radius-n box. Supports dimensions 1..4.
Estimate survival(const ModelSpec& spec, int n, long long trials, std::uint64_t seed);

// One shared sample per trial at the largest radius, evaluated at every
// requested radius; escape counts are then pathwise non-increasing in n.
std::vector<Estimate> survival_nested(const ModelSpec& spec, const std::vector<int>& radii,
                                      long long trials, std::uint64_t seed);

// Empirical tail P(|For(o*)| >= n) for n = 1..n_max of the dual forward set
// size; escapes of the radius-n_max window count as size >= n_max.
std::vector<double> dual_tail(const ModelSpec& spec, int n_max, long long trials,
                              std::uint64_t seed);

struct PcResult {
    Rat lo, hi;        // bracketing interval
    int n = 0;         // window radius used
    double criterion = 0.5;
    long long trials_per_probe = 0;
    std::uint64_t seed = 0;
};

// Bisection of the finite-size proxy "survival(p, n) crosses 1/2" to width
// tol. Requires survival(lo) < 1/2 <= survival(hi); reports a bracket only.
PcResult estimate_pc(const std::function<ModelSpec(Rat)>& family, Rat p_lo, Rat p_hi, int n,
                     long long trials, Rat tol, std::uint64_t seed);

// Open directed path crossing [0,3L]x[0,L] from the left side to the right
// side, staying inside the rectangle.
Estimate crossing(const ModelSpec& spec, int L, long long trials, std::uint64_t seed);

// Open directed cycle of winding number +-1 around the origin inside the
// annulus {L/2 < ||v||_inf <= 3L/2}. Exact detection: cut the annulus along
// the positive x-axis and look for a winding-potential inconsistency inside a
// strongly connected component of the open subgraph.
Estimate annulus_cycle(const ModelSpec& spec, int L, long long trials, std::uint64_t seed);

// Cheaper sufficient condition: four rotated directed crossings glued around
// the annulus. Pathwise implies the exact event.
Estimate annulus_cycle_glue(const ModelSpec& spec, int L, long long trials, std::uint64_t seed);

// Single-trial evaluations used for pathwise checks.
bool crossing_trial(const ModelSpec& spec, int L, std::uint64_t trial_seed);
bool annulus_cycle_trial(const ModelSpec& spec, int L, std::uint64_t trial_seed);
bool annulus_glue_trial(const ModelSpec& spec, int L, std::uint64_t trial_seed);
bool escape_trial(const ModelSpec& spec, int n, std::uint64_t trial_seed);

struct ComparisonRow {
    std::string model;
    Estimate estimate;
};

// Survival estimates of the five degree-two-level models at a common radius.
std::vector<ComparisonRow> theta_comparison(int n, long long trials, std::uint64_t seed);

// Survival of the isotropic degree-two family across rho values.
std::vector<std::pair<Rat, Estimate>> theta_vs_rho(const std::vector<Rat>& rhos, int n,
                                                   long long trials, std::uint64_t seed);

}  // namespace neighperc
