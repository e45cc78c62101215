#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace neighperc {

// Monte Carlo result: point estimate with a 95% confidence interval (Wilson
// for proportions, normal for means of counts).
struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    long long trials = 0;
    std::uint64_t seed = 0;
};

Estimate proportion_estimate(long long successes, long long trials, std::uint64_t seed);

// Mean of integer per-trial values, from exact integer sums.
Estimate mean_estimate(long long sum, long long sum_sq, long long trials, std::uint64_t seed);

std::pair<double, double> wilson_interval(long long successes, long long trials);

// Worker count used by the trial runners; settable once from the CLI.
int worker_threads();
void set_worker_threads(int n);

// Splits [0,trials) over worker threads. `fn(t, acc)` must be a pure function
// of the trial index given the enclosing seeds, and Acc must merge by
// `merge(other)` with integer fields only, so results never depend on the
// thread count.
template <class Acc, class Fn>
Acc run_trials(long long trials, Fn&& fn) {
    int nt = worker_threads();
    if (trials < 256 || nt <= 1) {
        Acc acc{};
        for (long long t = 0; t < trials; ++t) fn(t, acc);
        return acc;
    }
    std::vector<Acc> parts(static_cast<std::size_t>(nt));
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(nt));
    for (int w = 0; w < nt; ++w) {
        workers.emplace_back([&, w] {
            long long lo = trials * w / nt;
            long long hi = trials * (w + 1) / nt;
            for (long long t = lo; t < hi; ++t) fn(t, parts[static_cast<std::size_t>(w)]);
        });
    }
    for (auto& th : workers) th.join();
    Acc acc{};
    for (auto& part : parts) acc.merge(part);
    return acc;
}

struct CountAcc {
    long long successes = 0;
    void merge(const CountAcc& o) { successes += o.successes; }
};

}  // namespace neighperc
