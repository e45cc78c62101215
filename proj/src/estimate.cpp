#include "neighperc/estimate.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace neighperc {

namespace {

// Lazy d-dimensional escape BFS. Vertex ranks follow the row-major rule of
// sample_configuration (first coordinate fastest), so d=2 trials match the
// pre-sampled path bit-exactly.
struct EscapeScratch {
    std::vector<std::uint8_t> visited;
    std::vector<int> queue;
};

int escape_max_distance(const ModelSpec& spec, int n, std::uint64_t trial_seed, int stop_at) {
    thread_local EscapeScratch scratch;
    const int d = spec.dim;
    const int side = 2 * n + 1;
    long long cells = 1;
    for (int i = 0; i < d; ++i) cells *= side;
    auto& visited = scratch.visited;
    visited.assign(static_cast<std::size_t>(cells), 0);
    auto& queue = scratch.queue;
    queue.clear();

    std::array<long long, 4> stride{};
    long long s = 1;
    for (int i = 0; i < d; ++i) {
        stride[static_cast<std::size_t>(i)] = s;
        s *= side;
    }
    auto decode = [&](long long rank, std::array<int, 4>& c) {
        for (int i = 0; i < d; ++i) {
            c[static_cast<std::size_t>(i)] = static_cast<int>(rank % side) - n;
            rank /= side;
        }
    };
    auto dist_of = [&](const std::array<int, 4>& c) {
        int m = 0;
        for (int i = 0; i < d; ++i) m = std::max(m, std::abs(c[static_cast<std::size_t>(i)]));
        return m;
    };

    long long origin = 0;
    for (int i = 0; i < d; ++i) origin += n * stride[static_cast<std::size_t>(i)];
    visited[static_cast<std::size_t>(origin)] = 1;
    queue.push_back(static_cast<int>(origin));
    int max_dist = 0;
    std::array<int, 4> c{};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        long long rank = queue[head];
        decode(rank, c);
        int dist = dist_of(c);
        max_dist = std::max(max_dist, dist);
        if (max_dist >= stop_at) return max_dist;
        if (dist == n) continue;  // boundary vertices are not expanded
        SplitMix64 stream(derive(trial_seed, kStreamVertex, static_cast<std::uint64_t>(rank)));
        VertexOutcome m = sample_vertex_outcome(spec, stream);
        for (int dir = 0; dir < 2 * d; ++dir) {
            if (!outcome_has(m, dir)) continue;
            int axis = dir % d;
            int step = dir < d ? 1 : -1;
            long long nrank = rank + step * stride[static_cast<std::size_t>(axis)];
            if (!visited[static_cast<std::size_t>(nrank)]) {
                visited[static_cast<std::size_t>(nrank)] = 1;
                queue.push_back(static_cast<int>(nrank));
            }
        }
    }
    return max_dist;
}

}  // namespace

bool escape_trial(const ModelSpec& spec, int n, std::uint64_t trial_seed) {
    return escape_max_distance(spec, n, trial_seed, n) >= n;
}

Estimate survival(const ModelSpec& spec, int n, long long trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("survival: trials < 1");
    if (spec.dim < 1 || spec.dim > 4) throw std::invalid_argument("survival: dim outside 1..4");
    auto acc = run_trials<CountAcc>(trials, [&](long long t, CountAcc& a) {
        if (escape_trial(spec, n, derive(seed, kStreamTrial, t))) ++a.successes;
    });
    return proportion_estimate(acc.successes, trials, seed);
}

std::vector<Estimate> survival_nested(const ModelSpec& spec, const std::vector<int>& radii,
                                      long long trials, std::uint64_t seed) {
    int n_max = *std::max_element(radii.begin(), radii.end());
    struct Acc {
        std::array<long long, 16> hits{};
        void merge(const Acc& o) {
            for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += o.hits[i];
        }
    };
    if (radii.size() > 16) throw std::invalid_argument("survival_nested: too many radii");
    auto acc = run_trials<Acc>(trials, [&](long long t, Acc& a) {
        int reach = escape_max_distance(spec, n_max, derive(seed, kStreamTrial, t), n_max);
        for (std::size_t i = 0; i < radii.size(); ++i)
            if (reach >= radii[i]) ++a.hits[i];
    });
    std::vector<Estimate> out;
    for (std::size_t i = 0; i < radii.size(); ++i)
        out.push_back(proportion_estimate(acc.hits[i], trials, seed));
    return out;
}

std::vector<double> dual_tail(const ModelSpec& spec, int n_max, long long trials,
                              std::uint64_t seed) {
    if (spec.dim != 2) throw std::invalid_argument("dual_tail: planar models only");
    const Window window{0, 0, n_max};
    struct Acc {
        std::vector<long long> hist;
        void merge(const Acc& o) {
            if (hist.size() < o.hist.size()) hist.resize(o.hist.size(), 0);
            for (std::size_t i = 0; i < o.hist.size(); ++i) hist[i] += o.hist[i];
        }
    };
    auto acc = run_trials<Acc>(trials, [&](long long t, Acc& a) {
        if (a.hist.empty()) a.hist.assign(static_cast<std::size_t>(n_max) + 1, 0);
        std::uint64_t ts = derive(seed, kStreamTrial, t);
        // Lazy dual BFS: the owner of each dual edge supplies its state.
        std::unordered_map<long long, VertexOutcome> cache;
        auto outcome = [&](PrimalVertex z) {
            long long r = window.rank(z.x, z.y);
            auto it = cache.find(r);
            if (it != cache.end()) return it->second;
            SplitMix64 stream(derive(ts, kStreamVertex, static_cast<std::uint64_t>(r)));
            VertexOutcome m = sample_vertex_outcome(spec, stream);
            cache.emplace(r, m);
            return m;
        };
        PointSet seen;
        std::deque<DualVertex> queue{{0, 0}};
        seen.insert({0, 0});
        long long size = 0;
        bool escaped = false;
        while (!queue.empty()) {
            DualVertex v = queue.front();
            queue.pop_front();
            ++size;
            if (size >= n_max) break;
            if (!window.dual_safe(v)) {
                escaped = true;
                break;
            }
            for (int dd = 0; dd < 4; ++dd) {
                DirectedDualEdge e{v, static_cast<Dir>(dd)};
                DirectedPrimalEdge pe = dual_to_primal(e);
                if (outcome_has(outcome(pe.tail), static_cast<int>(pe.dir))) continue;
                DualVertex h = e.head();
                if (seen.insert(h).second) queue.push_back(h);
            }
        }
        if (escaped) size = n_max;
        ++a.hist[static_cast<std::size_t>(std::min<long long>(size, n_max))];
    });
    // Suffix sums: tail[n] = P(size >= n), n = 1..n_max (index n-1).
    std::vector<double> tail(static_cast<std::size_t>(n_max));
    long long cum = 0;
    for (int nn = n_max; nn >= 1; --nn) {
        cum += acc.hist[static_cast<std::size_t>(nn)];
        tail[static_cast<std::size_t>(nn - 1)] = static_cast<double>(cum) / trials;
    }
    return tail;
}

PcResult estimate_pc(const std::function<ModelSpec(Rat)>& family, Rat p_lo, Rat p_hi, int n,
                     long long trials, Rat tol, std::uint64_t seed) {
    if (!(p_lo < p_hi)) throw std::invalid_argument("estimate_pc: empty bracket");
    auto probe = [&](Rat p, int index) {
        return survival(family(p), n, trials, derive(seed, kStreamProbe, index)).mean;
    };
    if (!(probe(p_lo, 0) < 0.5))
        throw std::invalid_argument("estimate_pc: lower endpoint already survives");
    if (!(probe(p_hi, 1) >= 0.5))
        throw std::invalid_argument("estimate_pc: upper endpoint does not survive");
    int index = 2;
    Rat lo = p_lo, hi = p_hi;
    while (tol < rat_sub(hi, lo)) {
        Rat mid = rat_mul(rat_add(lo, hi), Rat(1, 2));
        if (probe(mid, index++) >= 0.5)
            hi = mid;
        else
            lo = mid;
    }
    return {lo, hi, n, 0.5, trials, seed};
}

namespace {

// Rank order for rectangle-based trials: y*(width) + x over the rectangle's
// own coordinates.
struct RectSampler {
    const ModelSpec& spec;
    std::uint64_t trial_seed;
    int x0, y0, width;

    VertexOutcome operator()(int x, int y) const {
        long long rank = static_cast<long long>(y - y0) * width + (x - x0);
        SplitMix64 stream(derive(trial_seed, kStreamVertex, static_cast<std::uint64_t>(rank)));
        return sample_vertex_outcome(spec, stream);
    }
};

// Directed crossing of an axis-aligned rectangle from one side to another.
// side: 0=left,1=bottom,2=right,3=top (source side -> opposite side).
bool rect_crossing(const ModelSpec& spec, std::uint64_t trial_seed, int x0, int y0, int x1,
                   int y1, int source_side, int sample_x0, int sample_y0, int sample_w) {
    RectSampler sampler{spec, trial_seed, sample_x0, sample_y0, sample_w};
    const int w = x1 - x0 + 1, h = y1 - y0 + 1;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
    std::vector<std::pair<int, int>> queue;
    auto idx = [&](int x, int y) {
        return static_cast<std::size_t>(y - y0) * w + static_cast<std::size_t>(x - x0);
    };
    auto at_goal = [&](int x, int y) {
        switch (source_side) {
            case 0: return x == x1;
            case 1: return y == y1;
            case 2: return x == x0;
            default: return y == y0;
        }
    };
    auto push_source = [&](int x, int y) {
        visited[idx(x, y)] = 1;
        queue.emplace_back(x, y);
    };
    switch (source_side) {
        case 0:
            for (int y = y0; y <= y1; ++y) push_source(x0, y);
            break;
        case 1:
            for (int x = x0; x <= x1; ++x) push_source(x, y0);
            break;
        case 2:
            for (int y = y0; y <= y1; ++y) push_source(x1, y);
            break;
        default:
            for (int x = x0; x <= x1; ++x) push_source(x, y1);
            break;
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [x, y] = queue[head];
        if (at_goal(x, y)) return true;
        VertexOutcome m = sampler(x, y);
        for (int d = 0; d < 4; ++d) {
            if (!outcome_has(m, d)) continue;
            int nx = x + kDirDx[d], ny = y + kDirDy[d];
            if (nx < x0 || nx > x1 || ny < y0 || ny > y1) continue;
            if (!visited[idx(nx, ny)]) {
                visited[idx(nx, ny)] = 1;
                queue.emplace_back(nx, ny);
            }
        }
    }
    return false;
}

}  // namespace

bool crossing_trial(const ModelSpec& spec, int L, std::uint64_t trial_seed) {
    return rect_crossing(spec, trial_seed, 0, 0, 3 * L, L, 0, 0, 0, 3 * L + 1);
}

Estimate crossing(const ModelSpec& spec, int L, long long trials, std::uint64_t seed) {
    if (L < 2) throw std::invalid_argument("crossing: L < 2");
    auto acc = run_trials<CountAcc>(trials, [&](long long t, CountAcc& a) {
        if (crossing_trial(spec, L, derive(seed, kStreamTrial, t))) ++a.successes;
    });
    return proportion_estimate(acc.successes, trials, seed);
}

namespace {

// Exact annulus winding detection. Vertices of the open annulus subgraph are
// indexed; SCCs come from an iterative Tarjan pass; inside each SCC a winding
// potential is propagated and any inconsistent edge certifies a cycle of
// nonzero (hence +-1) winding.
struct AnnulusGraph {
    int r_in, r_out;
    std::vector<long long> cell_of;           // vertex index -> window rank
    std::unordered_map<long long, int> id_of; // window rank -> vertex index
    std::vector<std::array<int, 4>> succ;     // -1 = none
    std::vector<std::array<std::int8_t, 4>> delta;
};

AnnulusGraph build_annulus(const ModelSpec& spec, int L, std::uint64_t trial_seed) {
    AnnulusGraph g;
    g.r_in = L / 2;
    g.r_out = (3 * L) / 2;
    const Window window{0, 0, g.r_out};
    auto inside = [&](int x, int y) {
        int d = std::max(std::abs(x), std::abs(y));
        return d > g.r_in && d <= g.r_out;
    };
    for (int y = -g.r_out; y <= g.r_out; ++y)
        for (int x = -g.r_out; x <= g.r_out; ++x) {
            if (!inside(x, y)) continue;
            g.id_of.emplace(window.rank(x, y), static_cast<int>(g.cell_of.size()));
            g.cell_of.push_back(window.rank(x, y));
        }
    g.succ.assign(g.cell_of.size(), {-1, -1, -1, -1});
    g.delta.assign(g.cell_of.size(), {0, 0, 0, 0});
    const int side = window.side();
    for (std::size_t i = 0; i < g.cell_of.size(); ++i) {
        long long rank = g.cell_of[i];
        int x = static_cast<int>(rank % side) - g.r_out;
        int y = static_cast<int>(rank / side) - g.r_out;
        SplitMix64 stream(derive(trial_seed, kStreamVertex, static_cast<std::uint64_t>(rank)));
        VertexOutcome m = sample_vertex_outcome(spec, stream);
        for (int d = 0; d < 4; ++d) {
            if (!outcome_has(m, d)) continue;
            int nx = x + kDirDx[d], ny = y + kDirDy[d];
            if (!inside(nx, ny)) continue;
            auto it = g.id_of.find(window.rank(nx, ny));
            g.succ[i][static_cast<std::size_t>(d)] = it->second;
            // Crossings of the cut {y = 1/2, x >= 1}.
            if (x >= 1 && y == 0 && ny == 1) g.delta[i][static_cast<std::size_t>(d)] = 1;
            if (x >= 1 && y == 1 && ny == 0) g.delta[i][static_cast<std::size_t>(d)] = -1;
        }
    }
    return g;
}

// Iterative Tarjan; returns the component id per vertex.
std::vector<int> tarjan_scc(const AnnulusGraph& g) {
    const int n = static_cast<int>(g.cell_of.size());
    std::vector<int> comp(n, -1), low(n, 0), disc(n, -1), stack_mark(n, 0);
    std::vector<int> stck;
    int timer = 0, ncomp = 0;
    struct Frame {
        int v;
        int next_dir;
    };
    std::vector<Frame> frames;
    for (int root = 0; root < n; ++root) {
        if (disc[root] != -1) continue;
        frames.push_back({root, 0});
        disc[root] = low[root] = timer++;
        stck.push_back(root);
        stack_mark[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next_dir < 4) {
                int w = g.succ[static_cast<std::size_t>(f.v)][static_cast<std::size_t>(f.next_dir)];
                ++f.next_dir;
                if (w < 0) continue;
                if (disc[w] == -1) {
                    disc[w] = low[w] = timer++;
                    stck.push_back(w);
                    stack_mark[w] = 1;
                    frames.push_back({w, 0});
                } else if (stack_mark[w]) {
                    low[f.v] = std::min(low[f.v], disc[w]);
                }
            } else {
                int v = f.v;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().v] = std::min(low[frames.back().v], low[v]);
                if (low[v] == disc[v]) {
                    while (true) {
                        int w = stck.back();
                        stck.pop_back();
                        stack_mark[w] = 0;
                        comp[w] = ncomp;
                        if (w == v) break;
                    }
                    ++ncomp;
                }
            }
        }
    }
    return comp;
}

bool has_winding_cycle(const AnnulusGraph& g) {
    std::vector<int> comp = tarjan_scc(g);
    const int n = static_cast<int>(g.cell_of.size());
    std::vector<int> phi(n, INT32_MIN);
    std::vector<int> queue;
    for (int root = 0; root < n; ++root) {
        if (phi[root] != INT32_MIN) continue;
        phi[root] = 0;
        queue.clear();
        queue.push_back(root);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int v = queue[head];
            for (int d = 0; d < 4; ++d) {
                int w = g.succ[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)];
                if (w < 0 || comp[w] != comp[root]) continue;
                int want = phi[v] + g.delta[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)];
                if (phi[w] == INT32_MIN) {
                    phi[w] = want;
                    queue.push_back(w);
                } else if (phi[w] != want) {
                    return true;
                }
            }
        }
    }
    return false;
}

}  // namespace

bool annulus_cycle_trial(const ModelSpec& spec, int L, std::uint64_t trial_seed) {
    return has_winding_cycle(build_annulus(spec, L, trial_seed));
}

Estimate annulus_cycle(const ModelSpec& spec, int L, long long trials, std::uint64_t seed) {
    if (L < 2) throw std::invalid_argument("annulus_cycle: L < 2");
    auto acc = run_trials<CountAcc>(trials, [&](long long t, CountAcc& a) {
        if (annulus_cycle_trial(spec, L, derive(seed, kStreamTrial, t))) ++a.successes;
    });
    return proportion_estimate(acc.successes, trials, seed);
}

bool annulus_glue_trial(const ModelSpec& spec, int L, std::uint64_t trial_seed) {
    const int r_in = L / 2, r_out = (3 * L) / 2;
    const int sample_w = 2 * r_out + 1;
    // Four rotated copies of the horizontal crossing, sampled from the same
    // radius-r_out window as the exact detector.
    return rect_crossing(spec, trial_seed, -r_out, -r_out, r_out, -r_in, 0, -r_out, -r_out,
                         sample_w) &&
           rect_crossing(spec, trial_seed, r_in, -r_out, r_out, r_out, 1, -r_out, -r_out,
                         sample_w) &&
           rect_crossing(spec, trial_seed, -r_out, r_in, r_out, r_out, 2, -r_out, -r_out,
                         sample_w) &&
           rect_crossing(spec, trial_seed, -r_out, -r_out, -r_in, r_out, 3, -r_out, -r_out,
                         sample_w);
}

Estimate annulus_cycle_glue(const ModelSpec& spec, int L, long long trials, std::uint64_t seed) {
    if (L < 2) throw std::invalid_argument("annulus_cycle_glue: L < 2");
    auto acc = run_trials<CountAcc>(trials, [&](long long t, CountAcc& a) {
        if (annulus_glue_trial(spec, L, derive(seed, kStreamTrial, t))) ++a.successes;
    });
    return proportion_estimate(acc.successes, trials, seed);
}

std::vector<ComparisonRow> theta_comparison(int n, long long trials, std::uint64_t seed) {
    std::vector<std::pair<std::string, ModelSpec>> models = {
        {"ns-ew", ModelSpec::ns_ew(Rat(1, 2))},
        {"2-neighbor", ModelSpec::two_eps(Rat(0))},
        {"corner", ModelSpec::corner(Rat(1, 2))},
        {"iid", ModelSpec::iid(Rat(1, 2))},
        {"all-or-none", ModelSpec::all_or_none(Rat(1, 2))},
    };
    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < models.size(); ++i)
        rows.push_back(
            {models[i].first, survival(models[i].second, n, trials, derive(seed, i))});
    return rows;
}

std::vector<std::pair<Rat, Estimate>> theta_vs_rho(const std::vector<Rat>& rhos, int n,
                                                   long long trials, std::uint64_t seed) {
    std::vector<std::pair<Rat, Estimate>> out;
    for (std::size_t i = 0; i < rhos.size(); ++i)
        out.push_back({rhos[i], survival(ModelSpec::iso_degree_two(rhos[i]), n, trials,
                                         derive(seed, i))});
    return out;
}

}  // namespace neighperc
