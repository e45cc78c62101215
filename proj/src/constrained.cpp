#include "neighperc/constrained.hpp"

#include <algorithm>
#include <deque>

namespace neighperc {

BondConfig sample_bond(Rat q, const Window& window, std::uint64_t seed) {
    BondConfig c{window, q, seed, {}};
    c.open_edges.assign(static_cast<std::size_t>(window.vertex_count()) * 2, 0);
    const double qd = q.to_double();
    for (long long r = 0; r < window.vertex_count(); ++r) {
        for (int k = 0; k < 2; ++k) {
            SplitMix64 s(derive(seed, kStreamEdge, static_cast<std::uint64_t>(r) * 2 + k));
            int x = window.cx - window.radius + static_cast<int>(r % window.side());
            int y = window.cy - window.radius + static_cast<int>(r / window.side());
            UndirectedEdge e{x, y, k == 1};
            if (c.edge_exists(e) && s.unit() < qd) c.open_edges[r * 2 + k] = 1;
        }
    }
    return c;
}

BondConfig empty_bond(const Window& window) {
    BondConfig c{window, Rat(0), 0, {}};
    c.open_edges.assign(static_cast<std::size_t>(window.vertex_count()) * 2, 0);
    return c;
}

std::array<DualVertex, 6> PatternInstance::trail_vertices() const {
    // Base trail of the horizontal shape relative to the anchor.
    static constexpr std::array<std::pair<int, int>, 6> base = {
        {{0, 0}, {0, 1}, {1, 1}, {1, 0}, {2, 0}, {2, 1}}};
    std::array<DualVertex, 6> out;
    for (std::size_t i = 0; i < 6; ++i) {
        auto [dx, dy] = base[i];
        if (shape == PatternShape::Vertical) {
            int t = dx;  // ccw quarter turn: (x,y) -> (-y,x)
            dx = -dy;
            dy = t;
        }
        out[i] = {anchor.a + dx, anchor.b + dy};
    }
    return out;
}

std::array<UndirectedEdge, 5> PatternInstance::trail_edges() const {
    auto v = trail_vertices();
    std::array<UndirectedEdge, 5> out;
    for (std::size_t i = 0; i < 5; ++i) out[i] = undirected_between(v[i], v[i + 1]);
    return out;
}

std::array<UndirectedEdge, 2> PatternInstance::closed_edges() const {
    auto at = [&](int dx, int dy) {
        if (shape == PatternShape::Vertical) {
            int t = dx;
            dx = -dy;
            dy = t;
        }
        return DualVertex{anchor.a + dx, anchor.b + dy};
    };
    return {undirected_between(at(0, 0), at(1, 0)), undirected_between(at(1, 1), at(2, 1))};
}

bool pattern_occurs(const BondConfig& config, const PatternInstance& inst) {
    for (const auto& e : inst.trail_edges()) {
        if (!config.edge_exists(e)) throw std::invalid_argument("pattern_occurs: outside window");
        if (!config.open(e)) return false;
    }
    for (const auto& e : inst.closed_edges()) {
        if (!config.edge_exists(e)) throw std::invalid_argument("pattern_occurs: outside window");
        if (config.open(e)) return false;
    }
    return true;
}

std::optional<PatternInstance> match_pattern_window(const std::array<UndirectedEdge, 5>& w) {
    // Five distinct edges covering a 3x2 (or 2x3) vertex span are the only
    // candidates; the anchor then follows from the bounding box.
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            if (w[i] == w[j]) return std::nullopt;
    int min_x = w[0].x, max_x = w[0].x, min_y = w[0].y, max_y = w[0].y;
    for (const auto& e : w) {
        min_x = std::min(min_x, e.x);
        min_y = std::min(min_y, e.y);
        max_x = std::max(max_x, e.x + (e.vertical ? 0 : 1));
        max_y = std::max(max_y, e.y + (e.vertical ? 1 : 0));
    }
    PatternInstance cand;
    if (max_x - min_x == 2 && max_y - min_y == 1) {
        cand = {PatternShape::Horizontal, {min_x, min_y}};
    } else if (max_x - min_x == 1 && max_y - min_y == 2) {
        cand = {PatternShape::Vertical, {min_x + 1, min_y}};
    } else {
        return std::nullopt;
    }
    auto trail = cand.trail_edges();
    std::array<UndirectedEdge, 5> a = w, b = trail;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return std::nullopt;
    return cand;
}

namespace {

bool window_is_forbidden(const BondConfig& config, const std::array<UndirectedEdge, 5>& w) {
    return window_is_forbidden_with([&](const UndirectedEdge& e) { return config.open(e); }, w);
}

}  // namespace

bool path_uses_pattern(const std::vector<DualVertex>& path, const BondConfig& config) {
    if (path.size() < 2) return false;
    std::vector<UndirectedEdge> edges;
    edges.reserve(path.size() - 1);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        UndirectedEdge e = undirected_between(path[i], path[i + 1]);
        if (!config.open(e)) throw std::invalid_argument("path_uses_pattern: path not open");
        edges.push_back(e);
    }
    if (edges.size() < 5) return false;
    for (std::size_t i = 0; i + 5 <= edges.size(); ++i) {
        std::array<UndirectedEdge, 5> w;
        std::copy_n(edges.begin() + static_cast<long>(i), 5, w.begin());
        if (window_is_forbidden(config, w)) return true;
    }
    return false;
}

namespace {

// Memory of the last <= 4 steps encoded as direction nibbles plus a length,
// oldest step in the lowest bits.
struct Memory {
    std::uint16_t code = 0;  // 2 bits per dir, up to 4 dirs
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

// True when `h` is one of the vertices tracked by the memory window ending at
// `v`. Walks are kept locally self-avoiding over the tracked span; otherwise a
// short loop could flush the memory and sneak a full pattern traversal past
// the window check. Simple paths never trip this, so completeness is kept.
bool revisits_memory(DualVertex v, const Memory& mem, DualVertex h) {
    DualVertex cur = v;
    for (int i = mem.len - 1; i >= 0; --i) {
        Dir d = mem.dir_at(i);
        cur = {cur.a - kDirDx[static_cast<int>(d)], cur.b - kDirDy[static_cast<int>(d)]};
        if (cur == h) return true;
    }
    return false;
}

// Walks back from `v` through the memory to rebuild the last edges.
std::array<UndirectedEdge, 5> window_from_memory(DualVertex v, const Memory& mem, Dir next) {
    std::array<UndirectedEdge, 5> w;
    DualVertex cur = v;
    // memory holds the dirs leading INTO v, oldest first
    std::array<DualVertex, 5> pts;
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

}  // namespace

std::optional<std::vector<DualVertex>> constrained_connect(const BondConfig& config,
                                                           DualVertex source, int n) {
    const Window& win = config.window;
    if (std::max(std::abs(source.a - win.cx), std::abs(source.b - win.cy)) + n > win.radius)
        throw std::invalid_argument("constrained_connect: target sphere outside window");

    struct State {
        DualVertex v;
        Memory mem;
    };
    auto dist = [&](DualVertex v) {
        return std::max(std::abs(v.a - source.a), std::abs(v.b - source.b));
    };

    // Visited keyed by (vertex, memory).
    constexpr std::uint64_t kRoot = UINT64_MAX;
    std::unordered_map<std::uint64_t, std::uint64_t> parent;  // state key -> parent key*4+dir
    auto state_key = [&](const State& s) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(win.rank(s.v.a, s.v.b)))
                << 16) |
               s.mem.key();
    };

    std::deque<State> queue;
    State init{source, {}};
    parent[state_key(init)] = kRoot;
    if (n == 0) return std::vector<DualVertex>{source};
    queue.push_back(init);
    std::optional<State> goal;
    std::unordered_map<std::uint64_t, State> by_key;
    by_key[state_key(init)] = init;

    while (!queue.empty() && !goal) {
        State s = queue.front();
        queue.pop_front();
        for (int d = 0; d < 4 && !goal; ++d) {
            Dir dir = static_cast<Dir>(d);
            DualVertex h{s.v.a + kDirDx[d], s.v.b + kDirDy[d]};
            UndirectedEdge e{std::min(s.v.a, h.a), std::min(s.v.b, h.b), d == 1 || d == 3};
            if (!config.open(e)) continue;
            if (revisits_memory(s.v, s.mem, h)) continue;
            if (s.mem.len == 4) {
                auto w5 = window_from_memory(s.v, s.mem, dir);
                if (window_is_forbidden(config, w5)) continue;
            }
            State t{h, s.mem.push(dir)};
            if (dist(h) >= n) t.mem = {};  // terminal; memory irrelevant
            std::uint64_t key = state_key(t);
            if (parent.count(key)) continue;
            parent[key] = (state_key(s) << 2) | static_cast<std::uint64_t>(d);
            by_key[key] = t;
            if (dist(h) >= n) {
                goal = t;
                break;
            }
            queue.push_back(t);
        }
    }
    if (!goal) return std::nullopt;

    // Path reconstruction through parent pointers.
    std::vector<DualVertex> path;
    State cur = *goal;
    while (true) {
        path.push_back(cur.v);
        std::uint64_t p = parent[state_key(cur)];
        if (p == kRoot) break;
        cur = by_key[p >> 2];
    }
    std::reverse(path.begin(), path.end());
    return path;
}

bool unconstrained_connect(const BondConfig& config, DualVertex source, int n) {
    if (n == 0) return true;
    auto dist = [&](DualVertex v) {
        return std::max(std::abs(v.a - source.a), std::abs(v.b - source.b));
    };
    PointSet seen{source};
    std::deque<DualVertex> queue{source};
    while (!queue.empty()) {
        DualVertex v = queue.front();
        queue.pop_front();
        for (int d = 0; d < 4; ++d) {
            DualVertex h{v.a + kDirDx[d], v.b + kDirDy[d]};
            UndirectedEdge e{std::min(v.a, h.a), std::min(v.b, h.b), d == 1 || d == 3};
            if (!config.open(e) || seen.count(h)) continue;
            if (dist(h) >= n) return true;
            seen.insert(h);
            queue.push_back(h);
        }
    }
    return false;
}

namespace {

bool enumerate_paths(const BondConfig& config, DualVertex source, int n,
                     std::vector<DualVertex>& path, PointSet& on_path) {
    DualVertex v = path.back();
    for (int d = 0; d < 4; ++d) {
        DualVertex h{v.a + kDirDx[d], v.b + kDirDy[d]};
        if (on_path.count(h)) continue;
        UndirectedEdge e{std::min(v.a, h.a), std::min(v.b, h.b), d == 1 || d == 3};
        if (!config.open(e)) continue;
        // Prune prefixes that already traverse a pattern: check the window
        // ending with this step.
        if (path.size() >= 5) {
            std::array<UndirectedEdge, 5> w;
            for (int i = 0; i < 4; ++i) {
                std::size_t k = path.size() - 5 + static_cast<std::size_t>(i);
                w[static_cast<std::size_t>(i)] = undirected_between(path[k], path[k + 1]);
            }
            w[4] = e;
            if (window_is_forbidden(config, w)) continue;
        }
        if (std::max(std::abs(h.a - source.a), std::abs(h.b - source.b)) >= n) return true;
        path.push_back(h);
        on_path.insert(h);
        if (enumerate_paths(config, source, n, path, on_path)) return true;
        on_path.erase(h);
        path.pop_back();
    }
    return false;
}

}  // namespace

bool constrained_connect_by_enumeration(const BondConfig& config, DualVertex source, int n) {
    if (n == 0) return true;
    std::vector<DualVertex> path{source};
    PointSet on_path{source};
    return enumerate_paths(config, source, n, path, on_path);
}

}  // namespace neighperc
