#include "neighperc/enhance.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace neighperc {

EnhancedConfig enhanced_sample(Rat p, Rat q, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("enhanced_sample: n < 1");
    EnhancedConfig c;
    c.n = n;
    c.p = p;
    c.q = q;
    c.seed = seed;
    c.window = {0, 0, n};
    const std::size_t cells = static_cast<std::size_t>(c.window.vertex_count());
    c.u_p.resize(cells * 2);
    c.u_q.resize(cells * 2);
    for (std::size_t i = 0; i < cells * 2; ++i) {
        SplitMix64 sp(derive(seed, kStreamEdge, i));
        c.u_p[i] = sp.unit();
        SplitMix64 sq(derive(seed, kStreamDiagonal, i));
        c.u_q[i] = sq.unit();
    }
    return c;
}

EnhancedConfig enhanced_fixture(int n, const std::vector<UndirectedEdge>& open_p,
                                const std::vector<DiagonalEdge>& willing_q, Rat p, Rat q) {
    EnhancedConfig c;
    c.n = n;
    c.p = p;
    c.q = q;
    c.window = {0, 0, n};
    const std::size_t cells = static_cast<std::size_t>(c.window.vertex_count());
    c.u_p.assign(cells * 2, 1.0);
    c.u_q.assign(cells * 2, 1.0);
    for (const auto& e : open_p)
        c.u_p[static_cast<std::size_t>(c.window.rank(e.x, e.y)) * 2 + (e.vertical ? 1 : 0)] = 0.0;
    for (const auto& d : willing_q)
        c.u_q[static_cast<std::size_t>(c.window.rank(d.base.a, d.base.b)) * 2 +
              (d.steep ? 1 : 0)] = 0.0;
    return c;
}

namespace {

bool forced_matches_p(const std::optional<ForcedEdge>& forced, const UndirectedEdge& e) {
    return forced && forced->edge.kind == EnhancedEdgeRef::Kind::PEdge && forced->edge.pe == e;
}
bool forced_matches_q(const std::optional<ForcedEdge>& forced, const DiagonalEdge& d) {
    return forced && forced->edge.kind == EnhancedEdgeRef::Kind::QEdge && forced->edge.de == d;
}

int linf(DualVertex v) { return std::max(std::abs(v.a), std::abs(v.b)); }

}  // namespace

bool p_edge_open(const EnhancedConfig& c, Rat p, const UndirectedEdge& e,
                 const std::optional<ForcedEdge>& forced) {
    if (!c.p_edge_exists(e)) return false;
    double u = forced_matches_p(forced, e) ? forced->u : c.up(e);
    return u < p.to_double();
}

bool q_edge_open(const EnhancedConfig& c, Rat p, Rat q, int n, const DiagonalEdge& d,
                 const std::optional<ForcedEdge>& forced) {
    if (linf(d.base) >= n || linf(d.other()) >= n) return false;
    double u = forced_matches_q(forced, d) ? forced->u : c.uq(d);
    if (!(u < q.to_double())) return false;
    auto open = [&](const UndirectedEdge& e) { return p_edge_open(c, p, e, forced); };
    return pattern_occurs_with(open, d.pattern());
}

namespace {

// State memory identical to the constrained search; a diagonal hop resets it
// (a forbidden trail is made of plain edges only).
struct Memory {
    std::uint16_t code = 0;
    std::uint8_t len = 0;
    Memory push(Dir d) const {
        Memory m;
        if (len < 4) {
            m.len = static_cast<std::uint8_t>(len + 1);
            m.code = static_cast<std::uint16_t>(code | (static_cast<int>(d) << (2 * len)));
        } else {
            m.len = 4;
            m.code = static_cast<std::uint16_t>((code >> 2) | (static_cast<int>(d) << 6));
        }
        return m;
    }
    Dir dir_at(int i) const { return static_cast<Dir>((code >> (2 * i)) & 3); }
    std::uint16_t key() const { return static_cast<std::uint16_t>(code | (len << 8)); }
};

std::array<UndirectedEdge, 5> window_from_memory(DualVertex v, const Memory& mem, Dir next) {
    std::array<UndirectedEdge, 5> w;
    std::array<DualVertex, 5> pts;
    DualVertex cur = v;
    pts[mem.len] = v;
    for (int i = mem.len - 1; i >= 0; --i) {
        Dir d = mem.dir_at(i);
        cur = {cur.a - kDirDx[static_cast<int>(d)], cur.b - kDirDy[static_cast<int>(d)]};
        pts[i] = cur;
    }
    for (int i = 0; i < mem.len; ++i) w[i] = undirected_between(pts[i], pts[i + 1]);
    DualVertex head{v.a + kDirDx[static_cast<int>(next)], v.b + kDirDy[static_cast<int>(next)]};
    w[mem.len] = undirected_between(v, head);
    return w;
}

// Same local self-avoidance rule as the constrained search: without it, short
// loops flush the window memory and defeat the pattern check.
bool revisits_memory(DualVertex v, const Memory& mem, DualVertex h) {
    DualVertex cur = v;
    for (int i = mem.len - 1; i >= 0; --i) {
        Dir d = mem.dir_at(i);
        cur = {cur.a - kDirDx[static_cast<int>(d)], cur.b - kDirDy[static_cast<int>(d)]};
        if (cur == h) return true;
    }
    return false;
}

}  // namespace

namespace {

// Edge states resolved once per evaluation so the BFS only reads arrays.
struct EvalGraph {
    const EnhancedConfig* c = nullptr;
    int n = 0;
    std::vector<std::uint8_t> p_open;          // rank*2 + vertical
    std::vector<std::vector<DualVertex>> hop;  // open diagonal partners per rank

    bool open(const UndirectedEdge& e) const {
        if (!c->p_edge_exists(e)) return false;
        return p_open[static_cast<std::size_t>(c->window.rank(e.x, e.y)) * 2 +
                      (e.vertical ? 1 : 0)] != 0;
    }
};

EvalGraph build_eval_graph(const EnhancedConfig& c, Rat p, Rat q, int n,
                           const std::optional<ForcedEdge>& forced) {
    EvalGraph g;
    g.c = &c;
    g.n = n;
    const std::size_t cells = static_cast<std::size_t>(c.window.vertex_count());
    g.p_open.assign(cells * 2, 0);
    const int r = c.window.radius;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x)
            for (int k = 0; k < 2; ++k) {
                UndirectedEdge e{x, y, k == 1};
                if (p_edge_open(c, p, e, forced))
                    g.p_open[static_cast<std::size_t>(c.window.rank(x, y)) * 2 + k] = 1;
            }
    g.hop.assign(cells, {});
    for (int y = -(n - 1); y <= n - 1; ++y)
        for (int x = -(n - 1); x <= n - 1; ++x)
            for (int k = 0; k < 2; ++k) {
                DiagonalEdge d{{x, y}, k == 1};
                if (!q_edge_open(c, p, q, n, d, forced)) continue;
                DualVertex o = d.other();
                g.hop[static_cast<std::size_t>(c.window.rank(x, y))].push_back(o);
                g.hop[static_cast<std::size_t>(c.window.rank(o.a, o.b))].push_back(d.base);
            }
    return g;
}

bool connect_on_graph(const EvalGraph& g) {
    const int n = g.n;
    struct State {
        DualVertex v;
        Memory mem;
    };
    const Window& win = g.c->window;
    auto state_key = [&](const State& s) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(win.rank(s.v.a, s.v.b)))
                << 16) |
               s.mem.key();
    };
    auto popen = [&](const UndirectedEdge& e) { return g.open(e); };
    std::unordered_map<std::uint64_t, char> seen;
    std::deque<State> queue;
    State init{{0, 0}, {}};
    seen[state_key(init)] = 1;
    queue.push_back(init);
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        for (int d = 0; d < 4; ++d) {
            Dir dir = static_cast<Dir>(d);
            DualVertex h{s.v.a + kDirDx[d], s.v.b + kDirDy[d]};
            UndirectedEdge e{std::min(s.v.a, h.a), std::min(s.v.b, h.b), d == 1 || d == 3};
            if (!g.open(e)) continue;
            if (revisits_memory(s.v, s.mem, h)) continue;
            if (s.mem.len == 4 &&
                window_is_forbidden_with(popen, window_from_memory(s.v, s.mem, dir)))
                continue;
            if (linf(h) >= n) return true;
            State t{h, s.mem.push(dir)};
            auto [it, fresh] = seen.emplace(state_key(t), 1);
            (void)it;
            if (fresh) queue.push_back(t);
        }
        for (const DualVertex& h : g.hop[static_cast<std::size_t>(win.rank(s.v.a, s.v.b))]) {
            if (revisits_memory(s.v, s.mem, h)) continue;
            State t{h, {}};
            auto [it, fresh] = seen.emplace(state_key(t), 1);
            (void)it;
            if (fresh) queue.push_back(t);
        }
    }
    return false;
}

}  // namespace

bool enhanced_connect_at(const EnhancedConfig& c, Rat p, Rat q, int n,
                         const std::optional<ForcedEdge>& forced) {
    if (n < 1 || n > c.n) throw std::invalid_argument("enhanced_connect: bad radius");
    return connect_on_graph(build_eval_graph(c, p, q, n, forced));
}

bool enhanced_connect(const EnhancedConfig& c, int n) {
    return enhanced_connect_at(c, c.p, c.q, n, std::nullopt);
}

PivotalReport is_pivotal_enhanced(const EnhancedConfig& c, const EnhancedEdgeRef& edge, int n) {
    if (edge.kind == EnhancedEdgeRef::Kind::PEdge) {
        const auto& e = edge.pe;
        bool inside = c.p_edge_exists(e) &&
                      (linf({e.x, e.y}) < n ||
                       linf({e.x + (e.vertical ? 0 : 1), e.y + (e.vertical ? 1 : 0)}) < n);
        if (!inside) throw std::invalid_argument("is_pivotal_enhanced: p-edge outside universe");
    } else {
        const auto& d = edge.de;
        if (linf(d.base) >= n || linf(d.other()) >= n)
            throw std::invalid_argument("is_pivotal_enhanced: q-edge outside universe");
    }
    PivotalReport rep;
    rep.edge = edge;
    rep.with_open = enhanced_connect_at(c, c.p, c.q, n, ForcedEdge{edge, 0.0});
    rep.with_closed = enhanced_connect_at(c, c.p, c.q, n, ForcedEdge{edge, 1.0});
    rep.pivotal = rep.with_open && !rep.with_closed;
    return rep;
}

std::vector<UndirectedEdge> p_edges_in(int n) {
    std::vector<UndirectedEdge> out;
    for (int y = -n; y <= n; ++y)
        for (int x = -n; x <= n; ++x)
            for (int k = 0; k < 2; ++k) {
                UndirectedEdge e{x, y, k == 1};
                DualVertex a{x, y};
                DualVertex b{x + (k == 0 ? 1 : 0), y + (k == 1 ? 1 : 0)};
                if (linf(b) > n) continue;
                if (linf(a) < n || linf(b) < n) out.push_back(e);
            }
    return out;
}

std::vector<DiagonalEdge> q_edges_in(int n) {
    std::vector<DiagonalEdge> out;
    for (int y = -n; y <= n; ++y)
        for (int x = -n; x <= n; ++x)
            for (int k = 0; k < 2; ++k) {
                DiagonalEdge d{{x, y}, k == 1};
                if (linf(d.base) < n && linf(d.other()) < n) out.push_back(d);
            }
    return out;
}

Estimate theta_n(Rat p, Rat q, int n, long long trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("theta_n: trials < 1");
    auto acc = run_trials<CountAcc>(trials, [&](long long t, CountAcc& a) {
        EnhancedConfig c = enhanced_sample(p, q, n, derive(seed, kStreamTrial, t));
        if (enhanced_connect(c, n)) ++a.successes;
    });
    return proportion_estimate(acc.successes, trials, seed);
}

std::pair<Estimate, Estimate> russo_estimates(Rat p, Rat q, int n, long long trials,
                                              std::uint64_t seed) {
    if (n > 16) throw std::domain_error("russo_estimates: n > 16 guard");
    if (trials < 1) throw std::invalid_argument("russo_estimates: trials < 1");
    const auto pe = p_edges_in(n);
    const auto qe = q_edges_in(n);

    struct Acc {
        long long p_sum = 0, p_sq = 0, q_sum = 0, q_sq = 0;
        void merge(const Acc& o) {
            p_sum += o.p_sum;
            p_sq += o.p_sq;
            q_sum += o.q_sum;
            q_sq += o.q_sq;
        }
    };
    auto acc = run_trials<Acc>(trials, [&](long long t, Acc& a) {
        EnhancedConfig c = enhanced_sample(p, q, n, derive(seed, kStreamTrial, t));
        bool base = enhanced_connect(c, n);
        long long cp = 0, cq = 0;
        // Forcing an edge to its current state never changes the graph, so
        // one side of each pivotality check is the baseline evaluation.
        for (const auto& e : pe) {
            bool open_now = p_edge_open(c, p, e, std::nullopt);
            if (open_now != base) continue;  // the free side already refutes pivotality
            auto ref = EnhancedEdgeRef::p_edge(e);
            if (open_now) {
                // base == with-open == true; pivotal iff with-closed fails
                if (!enhanced_connect_at(c, p, q, n, ForcedEdge{ref, 1.0})) ++cp;
            } else {
                // base == with-closed == false; pivotal iff with-open holds
                if (enhanced_connect_at(c, p, q, n, ForcedEdge{ref, 0.0})) ++cp;
            }
        }
        for (const auto& d : qe) {
            bool open_now = q_edge_open(c, p, q, n, d, std::nullopt);
            if (open_now != base) continue;
            auto ref = EnhancedEdgeRef::q_edge(d);
            if (open_now) {
                if (!enhanced_connect_at(c, p, q, n, ForcedEdge{ref, 1.0})) ++cq;
            } else {
                // Forcing u=0 opens the diagonal only when its pattern
                // occurs; otherwise the graph is unchanged.
                auto popen = [&](const UndirectedEdge& e2) {
                    return p_edge_open(c, p, e2, std::nullopt);
                };
                if (!pattern_occurs_with(popen, d.pattern())) continue;
                if (enhanced_connect_at(c, p, q, n, ForcedEdge{ref, 0.0})) ++cq;
            }
        }
        a.p_sum += cp;
        a.p_sq += cp * cp;
        a.q_sum += cq;
        a.q_sq += cq * cq;
    });
    return {mean_estimate(acc.p_sum, acc.p_sq, trials, seed),
            mean_estimate(acc.q_sum, acc.q_sq, trials, seed)};
}

Estimate theta_finite_difference(Rat p, Rat q, int n, Rat h, bool in_q, long long trials,
                                 std::uint64_t seed) {
    // Common random numbers: the event is monotone in each parameter, so the
    // pathwise difference is a Bernoulli indicator.
    Rat lo_p = in_q ? p : Rat(p.num * h.den - h.num * p.den, p.den * h.den);
    Rat hi_p = in_q ? p : Rat(p.num * h.den + h.num * p.den, p.den * h.den);
    Rat lo_q = in_q ? Rat(q.num * h.den - h.num * q.den, q.den * h.den) : q;
    Rat hi_q = in_q ? Rat(q.num * h.den + h.num * q.den, q.den * h.den) : q;
    auto acc = run_trials<CountAcc>(trials, [&](long long t, CountAcc& a) {
        EnhancedConfig c = enhanced_sample(p, q, n, derive(seed, kStreamTrial, t));
        bool hi = enhanced_connect_at(c, hi_p, hi_q, n, std::nullopt);
        if (!hi) return;
        bool lo = enhanced_connect_at(c, lo_p, lo_q, n, std::nullopt);
        if (!lo) ++a.successes;
    });
    Estimate diff = proportion_estimate(acc.successes, trials, seed);
    const double scale = 2.0 * h.to_double();
    diff.mean /= scale;
    diff.stderr_ /= scale;
    diff.ci_lo = diff.mean - 1.959963984540054 * diff.stderr_;
    diff.ci_hi = diff.mean + 1.959963984540054 * diff.stderr_;
    return diff;
}

long long monotone_event_check(int n, std::uint64_t seed,
                               const std::vector<std::pair<Rat, Rat>>& grid, long long trials) {
    struct Acc {
        long long violations = 0;
        void merge(const Acc& o) { violations += o.violations; }
    };
    auto acc = run_trials<Acc>(trials, [&](long long t, Acc& a) {
        EnhancedConfig c = enhanced_sample(Rat(1, 2), Rat(1, 2), n, derive(seed, kStreamTrial, t));
        std::vector<char> hit(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            hit[i] = enhanced_connect_at(c, grid[i].first, grid[i].second, n, std::nullopt);
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (std::size_t j = 0; j < grid.size(); ++j) {
                if (i == j) continue;
                if (grid[i].first <= grid[j].first && grid[i].second <= grid[j].second &&
                    hit[i] && !hit[j])
                    ++a.violations;
            }
    });
    return acc.violations;
}

}  // namespace neighperc
