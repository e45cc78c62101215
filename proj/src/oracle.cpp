#include "neighperc/oracle.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace neighperc {

std::string bigrat_str(const BigRat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

BigRat conditional_dual_probability(const ConditionalScenario& sc) {
    if (sc.spec.dim != 2)
        throw std::invalid_argument("conditional_dual_probability: planar models only");
    // Dual sibling statuses constrain the owner's out-edges: revealed-open
    // dual <=> closed primal, revealed-closed dual <=> open primal. The east
    // dual edge is open iff the east out-edge is closed.
    auto admits = [](SiblingStatus st, bool primal_open) {
        switch (st) {
            case SiblingStatus::Unexplored: return true;
            case SiblingStatus::RevealedOpen: return !primal_open;
            case SiblingStatus::RevealedClosed: return primal_open;
        }
        return true;
    };
    BigRat num = 0, den = 0;
    for (const auto& om : vertex_outcome_distribution(sc.spec)) {
        bool e = outcome_has(om.outcome, static_cast<int>(Dir::E));
        bool n = outcome_has(om.outcome, static_cast<int>(Dir::N));
        bool w = outcome_has(om.outcome, static_cast<int>(Dir::W));
        bool s = outcome_has(om.outcome, static_cast<int>(Dir::S));
        if (!admits(sc.north, n) || !admits(sc.west, w) || !admits(sc.south, s)) continue;
        BigRat mass = to_bigrat(om.mass);
        den += mass;
        if (!e) num += mass;
    }
    if (den == 0)
        throw std::invalid_argument("conditional_dual_probability: zero-probability conditioning");
    return num / den;
}

namespace {

// Escape check reading only interior outcomes of a radius-r window centered
// at the origin.
bool escape_from_center(const std::vector<VertexOutcome>& interior, int r) {
    const int side = 2 * r - 1;  // interior box
    std::array<std::uint32_t, 32> visited{};
    auto idx = [&](int x, int y) { return (y + r - 1) * side + (x + r - 1); };
    auto mark = [&](int i) { visited[static_cast<std::size_t>(i >> 5)] |= 1u << (i & 31); };
    auto seen = [&](int i) {
        return (visited[static_cast<std::size_t>(i >> 5)] >> (i & 31)) & 1u;
    };
    std::array<std::pair<int, int>, 1024> queue;
    int head = 0, tail = 0;
    queue[tail++] = {0, 0};
    mark(idx(0, 0));
    while (head < tail) {
        auto [x, y] = queue[head++];
        VertexOutcome m = interior[static_cast<std::size_t>(idx(x, y))];
        for (int d = 0; d < 4; ++d) {
            if (!outcome_has(m, d)) continue;
            int nx = x + kDirDx[d], ny = y + kDirDy[d];
            if (std::max(std::abs(nx), std::abs(ny)) >= r) return true;
            int i = idx(nx, ny);
            if (!seen(i)) {
                mark(i);
                queue[tail++] = {nx, ny};
            }
        }
    }
    return false;
}

struct Support {
    std::vector<OutcomeMass> dist;
    long long interior_count = 0;
    bool uniform = true;

    Support(const ModelSpec& spec, int radius) {
        if (radius < 1) throw std::invalid_argument("exhaustive: radius < 1");
        dist = vertex_outcome_distribution(spec);
        int side = 2 * radius - 1;
        interior_count = static_cast<long long>(side) * side;
        double total = 1.0;
        for (long long i = 0; i < interior_count; ++i) {
            total *= static_cast<double>(dist.size());
            if (total > 1e8) throw std::domain_error("exhaustive: configuration count over 1e8");
        }
        for (const auto& om : dist) uniform = uniform && om.mass == dist[0].mass;
    }
};

}  // namespace

BigRat exhaustive_window_probability(
    const ModelSpec& spec, int radius,
    const std::function<bool(const Configuration&)>& predicate) {
    Support sup(spec, radius);
    Window window{0, 0, radius};
    Configuration buffer{window, spec, 0, {}};
    buffer.outcomes.assign(static_cast<std::size_t>(window.vertex_count()), 0);

    std::vector<std::size_t> interior_ranks;
    for (int y = -(radius - 1); y <= radius - 1; ++y)
        for (int x = -(radius - 1); x <= radius - 1; ++x)
            interior_ranks.push_back(static_cast<std::size_t>(window.rank(x, y)));
    const std::size_t cells = interior_ranks.size();
    std::vector<int> digits(cells, 0);
    for (std::size_t i = 0; i < cells; ++i) buffer.outcomes[interior_ranks[i]] = sup.dist[0].outcome;

    long long common_den = 1;
    for (const auto& om : sup.dist) common_den = std::lcm(common_den, om.mass.den);
    std::vector<long long> nums;
    for (const auto& om : sup.dist) nums.push_back(om.mass.num * (common_den / om.mass.den));

    using boost::multiprecision::cpp_int;
    cpp_int num_sum = 0;
    long long hit_count = 0;
    bool running = true;
    while (running) {
        if (predicate(buffer)) {
            if (sup.uniform) {
                ++hit_count;
            } else {
                cpp_int w = 1;
                for (std::size_t i = 0; i < cells; ++i)
                    w *= nums[static_cast<std::size_t>(digits[i])];
                num_sum += w;
            }
        }
        std::size_t pos = 0;
        while (pos < cells) {
            if (++digits[pos] < static_cast<int>(sup.dist.size())) {
                buffer.outcomes[interior_ranks[pos]] =
                    sup.dist[static_cast<std::size_t>(digits[pos])].outcome;
                break;
            }
            digits[pos] = 0;
            buffer.outcomes[interior_ranks[pos]] = sup.dist[0].outcome;
            ++pos;
        }
        if (pos == cells) running = false;
    }

    cpp_int den = 1;
    for (std::size_t i = 0; i < cells; ++i) den *= common_den;
    if (sup.uniform) {
        cpp_int num = hit_count;
        for (std::size_t i = 0; i < cells; ++i) num *= nums[0];
        return BigRat(num, den);
    }
    return BigRat(num_sum, den);
}

BigRat exhaustive_escape_probability(const ModelSpec& spec, int radius) {
    Support sup(spec, radius);
    const int side_in = 2 * radius - 1;
    const std::size_t cells = static_cast<std::size_t>(side_in) * side_in;
    std::vector<int> digits(cells, 0);
    std::vector<VertexOutcome> interior(cells, sup.dist[0].outcome);

    using boost::multiprecision::cpp_int;
    // Per-config weight as a product of mass numerators over the common
    // per-vertex denominator.
    long long common_den = 1;
    for (const auto& om : sup.dist) common_den = std::lcm(common_den, om.mass.den);
    std::vector<long long> nums;
    for (const auto& om : sup.dist) nums.push_back(om.mass.num * (common_den / om.mass.den));

    cpp_int num_sum = 0;
    long long hit_count = 0;
    bool running = true;
    while (running) {
        if (escape_from_center(interior, radius)) {
            if (sup.uniform) {
                ++hit_count;
            } else {
                cpp_int w = 1;
                for (std::size_t i = 0; i < cells; ++i)
                    w *= nums[static_cast<std::size_t>(digits[i])];
                num_sum += w;
            }
        }
        std::size_t pos = 0;
        while (pos < cells) {
            if (++digits[pos] < static_cast<int>(sup.dist.size())) {
                interior[pos] = sup.dist[static_cast<std::size_t>(digits[pos])].outcome;
                break;
            }
            digits[pos] = 0;
            interior[pos] = sup.dist[0].outcome;
            ++pos;
        }
        if (pos == cells) running = false;
    }

    cpp_int den = 1;
    for (std::size_t i = 0; i < cells; ++i) den *= common_den;
    if (sup.uniform) {
        cpp_int num = hit_count;
        for (std::size_t i = 0; i < cells; ++i) num *= nums[0];
        return BigRat(num, den);
    }
    return BigRat(num_sum, den);
}

namespace {

long long saw_extend(std::vector<std::uint8_t>& occupied, int side, int x, int y, int remaining) {
    if (remaining == 0) return 1;
    long long total = 0;
    for (int d = 0; d < 4; ++d) {
        int nx = x + kDirDx[d], ny = y + kDirDy[d];
        std::size_t i = static_cast<std::size_t>(ny) * side + nx;
        if (occupied[i]) continue;
        occupied[i] = 1;
        total += saw_extend(occupied, side, nx, ny, remaining - 1);
        occupied[i] = 0;
    }
    return total;
}

}  // namespace

long long saw_count(int n) {
    if (n < 0 || n > 20) throw std::domain_error("saw_count: n outside 0..20");
    if (n == 0) return 1;
    const int side = 2 * n + 3;
    std::vector<std::uint8_t> occupied(static_cast<std::size_t>(side) * side, 0);
    int cx = n + 1, cy = n + 1;
    occupied[static_cast<std::size_t>(cy) * side + cx] = 1;
    return saw_extend(occupied, side, cx, cy, n);
}

namespace {

long long saw_memo_extend(std::vector<std::pair<int, int>>& walk, int remaining,
                          std::map<std::pair<int, std::string>, long long>& memo) {
    if (remaining == 0) return 1;
    // Key: occupied cells relative to the head, canonical order.
    auto [hx, hy] = walk.back();
    std::string key;
    {
        std::vector<std::pair<int, int>> rel;
        rel.reserve(walk.size());
        for (auto [x, y] : walk) rel.emplace_back(x - hx, y - hy);
        std::sort(rel.begin(), rel.end());
        key.reserve(rel.size() * 2);
        for (auto [dx, dy] : rel) {
            key.push_back(static_cast<char>(dx + 64));
            key.push_back(static_cast<char>(dy + 64));
        }
    }
    auto it = memo.find({remaining, key});
    if (it != memo.end()) return it->second;
    long long total = 0;
    for (int d = 0; d < 4; ++d) {
        std::pair<int, int> next{hx + kDirDx[d], hy + kDirDy[d]};
        if (std::find(walk.begin(), walk.end(), next) != walk.end()) continue;
        walk.push_back(next);
        total += saw_memo_extend(walk, remaining - 1, memo);
        walk.pop_back();
    }
    memo[{remaining, key}] = total;
    return total;
}

}  // namespace

long long saw_count_memoized(int n) {
    if (n < 0 || n > 16) throw std::domain_error("saw_count_memoized: n outside 0..16");
    if (n == 0) return 1;
    std::vector<std::pair<int, int>> walk{{0, 0}};
    std::map<std::pair<int, std::string>, long long> memo;
    return saw_memo_extend(walk, n, memo);
}

BigRat union_bound_term(Rat p, int n) {
    BigRat term = saw_count(n);
    BigRat pp = to_bigrat(p);
    for (int i = 0; i < n; ++i) term *= pp;
    return term;
}

}  // namespace neighperc
