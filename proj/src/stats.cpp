#include "neighperc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace neighperc {

namespace {
int g_threads = 0;
}

int worker_threads() {
    if (g_threads > 0) return g_threads;
    if (const char* env = std::getenv("NEIGHPERC_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_worker_threads(int n) { g_threads = n; }

std::pair<double, double> wilson_interval(long long successes, long long trials) {
    if (trials <= 0) throw std::invalid_argument("wilson_interval: no trials");
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Estimate proportion_estimate(long long successes, long long trials, std::uint64_t seed) {
    Estimate e;
    e.trials = trials;
    e.seed = seed;
    e.mean = static_cast<double>(successes) / static_cast<double>(trials);
    e.stderr_ = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(trials));
    auto [lo, hi] = wilson_interval(successes, trials);
    e.ci_lo = lo;
    e.ci_hi = hi;
    return e;
}

Estimate mean_estimate(long long sum, long long sum_sq, long long trials, std::uint64_t seed) {
    if (trials <= 0) throw std::invalid_argument("mean_estimate: no trials");
    Estimate e;
    e.trials = trials;
    e.seed = seed;
    const double n = static_cast<double>(trials);
    e.mean = static_cast<double>(sum) / n;
    double var = (static_cast<double>(sum_sq) - n * e.mean * e.mean) / std::max(1.0, n - 1.0);
    e.stderr_ = std::sqrt(std::max(0.0, var) / n);
    const double z = 1.959963984540054;
    e.ci_lo = e.mean - z * e.stderr_;
    e.ci_hi = e.mean + z * e.stderr_;
    return e;
}

}  // namespace neighperc
