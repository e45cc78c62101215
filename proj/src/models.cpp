#include "neighperc/models.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <sstream>

namespace neighperc {

namespace {

Rat rat_raw(__int128 num, __int128 den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    if (num > lim || num < -lim || den > lim)
        throw std::overflow_error("rational overflow");
    return Rat(static_cast<long long>(num), static_cast<long long>(den));
}

Rat operator*(Rat a, Rat b) { return rat_mul(a, b); }
Rat operator+(Rat a, Rat b) { return rat_add(a, b); }
Rat operator-(Rat a, Rat b) { return rat_sub(a, b); }

constexpr VertexOutcome kMaskE = 1u << 0;
constexpr VertexOutcome kMaskN = 1u << 1;
constexpr VertexOutcome kMaskW = 1u << 2;
constexpr VertexOutcome kMaskS = 1u << 3;

// Degree-two bases in their documented sampling order.
constexpr std::array<VertexOutcome, 4> kCornerPairs = {kMaskE | kMaskN, kMaskN | kMaskW,
                                                       kMaskW | kMaskS, kMaskS | kMaskE};
constexpr VertexOutcome kMaskNS = kMaskN | kMaskS;
constexpr VertexOutcome kMaskEW = kMaskE | kMaskW;

void accumulate(std::vector<OutcomeMass>& out, VertexOutcome m, Rat mass) {
    if (mass.num == 0) return;
    for (auto& om : out) {
        if (om.outcome == m) {
            om.mass = om.mass + mass;
            return;
        }
    }
    out.push_back({m, mass});
}

long long binomial(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

Rat rat_mul(Rat a, Rat b) {
    return rat_raw(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
}
Rat rat_add(Rat a, Rat b) {
    return rat_raw(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                   static_cast<__int128>(a.den) * b.den);
}
Rat rat_sub(Rat a, Rat b) { return rat_add(a, Rat(-b.num, b.den)); }

std::string Rat::str() const {
    std::ostringstream os;
    os << num;
    if (den != 1) os << '/' << den;
    return os.str();
}

Rat parse_rat(const std::string& text) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        long long n = std::stoll(text.substr(0, slash));
        long long d = std::stoll(text.substr(slash + 1));
        return Rat(n, d);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        long long scale = 1;
        for (std::size_t i = dot + 1; i < text.size(); ++i) scale *= 10;
        return Rat(std::stoll(digits), scale);
    }
    return Rat(std::stoll(text));
}

ModelSpec ModelSpec::k_neighbor(int d, Rat p) {
    if (d < 1) throw std::invalid_argument("k_neighbor: dimension must be >= 1");
    if (p.num < 0 || Rat(1) < p) throw std::invalid_argument("k_neighbor: p outside [0,1]");
    return {Family::KNeighbor, d, p};
}

ModelSpec ModelSpec::two_eps(Rat eps) {
    if (eps.num < 0 || Rat(1) <= eps) throw std::invalid_argument("two_eps: eps outside [0,1)");
    // p = 1/2 + eps/4
    return k_neighbor(2, rat_raw(static_cast<__int128>(2) * eps.den + eps.num,
                                 static_cast<__int128>(4) * eps.den));
}

ModelSpec ModelSpec::iid(Rat p, int d) {
    if (p.num < 0 || Rat(1) < p) throw std::invalid_argument("iid: p outside [0,1]");
    return {Family::IidDirected, d, p};
}

ModelSpec ModelSpec::all_or_none(Rat p, int d) {
    if (p.num < 0 || Rat(1) < p) throw std::invalid_argument("all_or_none: p outside [0,1]");
    return {Family::AllOrNone, d, p};
}

ModelSpec ModelSpec::ns_ew(Rat p) {
    if (p.num < 0 || Rat(1) < p) throw std::invalid_argument("ns_ew: p outside [0,1]");
    ModelSpec s{Family::NsEw, 2, p};
    if (s.stage_k() >= 3) throw std::invalid_argument("ns_ew: undefined for 4p >= 3");
    return s;
}

ModelSpec ModelSpec::corner(Rat p) {
    if (p.num < 0 || Rat(1) < p) throw std::invalid_argument("corner: p outside [0,1]");
    ModelSpec s{Family::Corner, 2, p};
    if (s.stage_k() >= 3) throw std::invalid_argument("corner: undefined for 4p >= 3");
    return s;
}

ModelSpec ModelSpec::iso_degree_two(Rat rho) {
    if (rho.num < 0 || Rat(1, 4) < rho)
        throw std::invalid_argument("iso_degree_two: rho outside [0,1/4]");
    return {Family::IsoDegreeTwo, 2, rho};
}

int ModelSpec::stage_k() const {
    return static_cast<int>(2LL * dim * p.num / p.den);
}

Rat ModelSpec::stage_eps() const {
    int k = stage_k();
    return rat_raw(static_cast<__int128>(2) * dim * p.num - static_cast<__int128>(k) * p.den,
                   p.den);
}

std::string ModelSpec::name() const {
    std::ostringstream os;
    switch (family) {
        case Family::KNeighbor: os << "2dp(d=" << dim << ",p=" << p.str() << ")"; break;
        case Family::IidDirected: os << "iid(d=" << dim << ",p=" << p.str() << ")"; break;
        case Family::AllOrNone: os << "aon(d=" << dim << ",p=" << p.str() << ")"; break;
        case Family::NsEw: os << "ns-ew(p=" << p.str() << ")"; break;
        case Family::Corner: os << "corner(p=" << p.str() << ")"; break;
        case Family::IsoDegreeTwo: os << "iso2(rho=" << p.str() << ")"; break;
    }
    return os.str();
}

std::vector<OutcomeMass> vertex_outcome_distribution(const ModelSpec& spec) {
    std::vector<OutcomeMass> out;
    const Rat one(1);
    switch (spec.family) {
        case ModelSpec::Family::KNeighbor: {
            const int slots = spec.degree_slots();
            const int k = spec.stage_k();
            const Rat eps = spec.stage_eps();
            const Rat mass_k = (one - eps) * Rat(1, binomial(slots, k));
            const Rat mass_k1 =
                k + 1 <= slots ? eps * Rat(1, binomial(slots, k + 1)) : Rat(0);
            for (VertexOutcome m = 0; m < (1u << slots); ++m) {
                int deg = outcome_degree(m);
                if (deg == k) accumulate(out, m, mass_k);
                if (deg == k + 1) accumulate(out, m, mass_k1);
            }
            break;
        }
        case ModelSpec::Family::IidDirected: {
            const int slots = spec.degree_slots();
            const Rat q = one - spec.p;
            for (VertexOutcome m = 0; m < (1u << slots); ++m) {
                Rat mass = one;
                for (int d = 0; d < slots; ++d) mass = mass * (outcome_has(m, d) ? spec.p : q);
                accumulate(out, m, mass);
            }
            break;
        }
        case ModelSpec::Family::AllOrNone: {
            accumulate(out, (1u << spec.degree_slots()) - 1, spec.p);
            accumulate(out, 0, one - spec.p);
            break;
        }
        case ModelSpec::Family::NsEw:
        case ModelSpec::Family::Corner: {
            const bool is_corner = spec.family == ModelSpec::Family::Corner;
            const int k = spec.stage_k();
            const Rat eps = spec.stage_eps();
            if (k == 0) {
                accumulate(out, 0, one - eps);
                for (int d = 0; d < 4; ++d) accumulate(out, 1u << d, eps * Rat(1, 4));
            } else if (k == 1) {
                for (int d = 0; d < 4; ++d) {
                    VertexOutcome first = 1u << d;
                    accumulate(out, first, (one - eps) * Rat(1, 4));
                    if (is_corner) {
                        Dir dd = static_cast<Dir>(d);
                        accumulate(out, first | (1u << static_cast<int>(rotate_ccw(dd))),
                                   eps * Rat(1, 8));
                        accumulate(out, first | (1u << static_cast<int>(rotate_cw(dd))),
                                   eps * Rat(1, 8));
                    } else {
                        accumulate(out, first | (1u << static_cast<int>(opposite(static_cast<Dir>(d)))),
                                   eps * Rat(1, 4));
                    }
                }
            } else {  // k == 2
                std::vector<VertexOutcome> bases;
                Rat base_mass;
                if (is_corner) {
                    bases.assign(kCornerPairs.begin(), kCornerPairs.end());
                    base_mass = Rat(1, 4);
                } else {
                    bases = {kMaskNS, kMaskEW};
                    base_mass = Rat(1, 2);
                }
                for (VertexOutcome base : bases) {
                    accumulate(out, base, (one - eps) * base_mass);
                    for (int d = 0; d < 4; ++d)
                        if (!outcome_has(base, d))
                            accumulate(out, base | (1u << d), eps * base_mass * Rat(1, 2));
                }
            }
            break;
        }
        case ModelSpec::Family::IsoDegreeTwo: {
            const Rat rho = spec.p;
            const Rat psi = (one - Rat(4) * rho) * Rat(1, 2);
            for (VertexOutcome m : kCornerPairs) accumulate(out, m, rho);
            accumulate(out, kMaskNS, psi);
            accumulate(out, kMaskEW, psi);
            break;
        }
    }
    return out;
}

Rat edge_marginal(const ModelSpec& spec) {
    Rat total(0);
    for (const auto& om : vertex_outcome_distribution(spec))
        if (outcome_has(om.outcome, 0)) total = total + om.mass;
    return total;
}

namespace {

VertexOutcome outcome_from_perm(int k, double eps, const std::array<std::uint8_t, 8>& perm,
                                double u, int slots) {
    VertexOutcome m = 0;
    for (int i = 0; i < k; ++i) m |= 1u << perm[i];
    if (k < slots && u < eps) m |= 1u << perm[k];
    return m;
}

struct PermDraw {
    std::array<std::uint8_t, 8> perm;
    double u;
};

PermDraw draw_perm(SplitMix64& stream, int slots) {
    PermDraw d;
    for (int i = 0; i < slots; ++i) d.perm[i] = static_cast<std::uint8_t>(i);
    for (int i = slots - 1; i >= 1; --i) {
        int j = static_cast<int>(stream.below(static_cast<std::uint32_t>(i + 1)));
        std::swap(d.perm[i], d.perm[j]);
    }
    d.u = stream.unit();
    return d;
}

VertexOutcome third_edge(VertexOutcome base, int pick) {
    for (int d = 0; d < 4; ++d)
        if (!outcome_has(base, d) && pick-- == 0) return base | (1u << d);
    throw std::logic_error("third_edge: bad pick");
}

}  // namespace

VertexOutcome sample_vertex_outcome(const ModelSpec& spec, SplitMix64& stream) {
    switch (spec.family) {
        case ModelSpec::Family::KNeighbor: {
            const int slots = spec.degree_slots();
            PermDraw d = draw_perm(stream, slots);
            return outcome_from_perm(spec.stage_k(), spec.stage_eps().to_double(), d.perm, d.u,
                                     slots);
        }
        case ModelSpec::Family::IidDirected: {
            const int slots = spec.degree_slots();
            const double p = spec.p.to_double();
            VertexOutcome m = 0;
            for (int dir = 0; dir < slots; ++dir)
                if (stream.unit() < p) m |= 1u << dir;
            return m;
        }
        case ModelSpec::Family::AllOrNone:
            return stream.unit() < spec.p.to_double() ? (1u << spec.degree_slots()) - 1 : 0;
        case ModelSpec::Family::NsEw:
        case ModelSpec::Family::Corner: {
            const bool is_corner = spec.family == ModelSpec::Family::Corner;
            const int k = spec.stage_k();
            const double eps = spec.stage_eps().to_double();
            if (k == 0) {
                int d1 = static_cast<int>(stream.below(4));
                return stream.unit() < eps ? (1u << d1) : 0;
            }
            if (k == 1) {
                int d1 = static_cast<int>(stream.below(4));
                VertexOutcome m = 1u << d1;
                if (stream.unit() < eps) {
                    if (is_corner) {
                        Dir second = stream.below(2) == 0 ? rotate_ccw(static_cast<Dir>(d1))
                                                          : rotate_cw(static_cast<Dir>(d1));
                        m |= 1u << static_cast<int>(second);
                    } else {
                        m |= 1u << static_cast<int>(opposite(static_cast<Dir>(d1)));
                    }
                }
                return m;
            }
            VertexOutcome base = is_corner ? kCornerPairs[stream.below(4)]
                                           : (stream.below(2) == 0 ? kMaskNS : kMaskEW);
            if (stream.unit() < eps) return third_edge(base, static_cast<int>(stream.below(2)));
            return base;
        }
        case ModelSpec::Family::IsoDegreeTwo: {
            const double rho = spec.p.to_double();
            const double psi = (1.0 - 4.0 * rho) / 2.0;
            double u = stream.unit();
            for (VertexOutcome m : kCornerPairs) {
                if (u < rho) return m;
                u -= rho;
            }
            return u < psi ? kMaskNS : kMaskEW;
        }
    }
    throw std::logic_error("bad family");
}

Configuration sample_configuration(const ModelSpec& spec, const Window& window,
                                   std::uint64_t seed) {
    if (window.radius < 1) throw std::invalid_argument("sample_configuration: radius < 1");
    Configuration c{window, spec, seed, {}};
    c.outcomes.resize(static_cast<std::size_t>(window.vertex_count()));
    for (long long r = 0; r < window.vertex_count(); ++r) {
        SplitMix64 stream(derive(seed, kStreamVertex, static_cast<std::uint64_t>(r)));
        c.outcomes[static_cast<std::size_t>(r)] = sample_vertex_outcome(spec, stream);
    }
    return c;
}

Configuration configuration_from_masks(const ModelSpec& spec, const Window& window,
                                       std::vector<VertexOutcome> masks) {
    if (static_cast<long long>(masks.size()) != window.vertex_count())
        throw std::invalid_argument("configuration_from_masks: size mismatch");
    return Configuration{window, spec, 0, std::move(masks)};
}

std::string Configuration::debug_text() const {
    std::ostringstream os;
    for (int y = window.cy + window.radius; y >= window.cy - window.radius; --y) {
        for (int x = window.cx - window.radius; x <= window.cx + window.radius; ++x) {
            if (x != window.cx - window.radius) os << ' ';
            VertexOutcome m = outcome_at({x, y});
            for (int d = 0; d < 4; ++d) os << (outcome_has(m, d) ? kDirChar[d] : '-');
        }
        os << '\n';
    }
    return os.str();
}

std::pair<Configuration, Configuration> sample_coupled_monotone(const ModelSpec& lo,
                                                                const ModelSpec& hi,
                                                                const Window& window,
                                                                std::uint64_t seed) {
    if (lo.family != ModelSpec::Family::KNeighbor || hi.family != ModelSpec::Family::KNeighbor)
        throw std::invalid_argument("sample_coupled_monotone: KNeighbor only");
    if (lo.dim != hi.dim) throw std::invalid_argument("sample_coupled_monotone: dim mismatch");
    if (hi.p < lo.p) throw std::invalid_argument("sample_coupled_monotone: p_lo > p_hi");

    Configuration a{window, lo, seed, {}};
    Configuration b{window, hi, seed, {}};
    const long long n = window.vertex_count();
    a.outcomes.resize(static_cast<std::size_t>(n));
    b.outcomes.resize(static_cast<std::size_t>(n));
    const int slots = lo.degree_slots();
    for (long long r = 0; r < n; ++r) {
        SplitMix64 stream(derive(seed, kStreamVertex, static_cast<std::uint64_t>(r)));
        PermDraw d = draw_perm(stream, slots);
        a.outcomes[static_cast<std::size_t>(r)] =
            outcome_from_perm(lo.stage_k(), lo.stage_eps().to_double(), d.perm, d.u, slots);
        b.outcomes[static_cast<std::size_t>(r)] =
            outcome_from_perm(hi.stage_k(), hi.stage_eps().to_double(), d.perm, d.u, slots);
    }
    return {std::move(a), std::move(b)};
}

std::vector<std::uint8_t> aon_to_site(const Configuration& config) {
    if (config.spec.family != ModelSpec::Family::AllOrNone)
        throw std::invalid_argument("aon_to_site: AllOrNone only");
    const VertexOutcome full = (1u << config.spec.degree_slots()) - 1;
    std::vector<std::uint8_t> site(config.outcomes.size());
    for (std::size_t i = 0; i < config.outcomes.size(); ++i)
        site[i] = config.outcomes[i] == full ? 1 : 0;
    return site;
}

IidUndirectedCoupling couple_iid_directed_undirected(Rat p, const Window& window,
                                                     std::uint64_t seed) {
    const double pd = p.to_double();
    IidUndirectedCoupling out;
    out.window = window;
    const long long n = window.vertex_count();
    out.directed_open.assign(static_cast<std::size_t>(n) * 4, 0);
    out.undirected_open.assign(static_cast<std::size_t>(n) * 2, 0);
    out.consulted.assign(static_cast<std::size_t>(n) * 2, 0);

    auto in_window = [&](PrimalVertex v) { return window.contains(v); };
    auto edge_uniform = [&](PrimalVertex tail, Dir dir) {
        std::uint64_t key = static_cast<std::uint64_t>(window.rank(tail.x, tail.y)) * 4 +
                            static_cast<std::uint64_t>(dir);
        SplitMix64 s(derive(seed, kStreamEdge, key));
        return s.unit();
    };
    auto directed_open = [&](PrimalVertex tail, Dir dir) { return edge_uniform(tail, dir) < pd; };

    for (long long r = 0; r < n; ++r) {
        int x = window.cx - window.radius + static_cast<int>(r % window.side());
        int y = window.cy - window.radius + static_cast<int>(r / window.side());
        for (int d = 0; d < 4; ++d) {
            PrimalVertex head{x + kDirDx[d], y + kDirDy[d]};
            if (in_window(head) && directed_open({x, y}, static_cast<Dir>(d)))
                out.directed_open[static_cast<std::size_t>(r) * 4 + d] = 1;
        }
    }

    // Canonical undirected key: E/N edge from the lexicographically smaller
    // endpoint (which is always the tail of the E or N direction).
    auto canon_index = [&](PrimalVertex tail, Dir dir) -> std::pair<std::size_t, bool> {
        if (dir == Dir::E || dir == Dir::N)
            return {static_cast<std::size_t>(window.rank(tail.x, tail.y)) * 2 +
                        (dir == Dir::N ? 1 : 0),
                    false};
        PrimalVertex h{tail.x + kDirDx[static_cast<int>(dir)],
                       tail.y + kDirDy[static_cast<int>(dir)]};
        return {static_cast<std::size_t>(window.rank(h.x, h.y)) * 2 + (dir == Dir::S ? 1 : 0),
                true};
    };

    // Breadth-first exploration of the forward set of the window center, in
    // counter-clockwise direction order. Each undirected edge copies the
    // uniform of the directed edge that revealed it.
    std::unordered_set<PrimalVertex, PointHash> visited;
    std::vector<std::uint8_t> revealed(static_cast<std::size_t>(n) * 4, 0);
    std::deque<DirectedPrimalEdge> queue;
    PrimalVertex center{window.cx, window.cy};
    visited.insert(center);
    out.forward_set.push_back(center);
    for (int d = 0; d < 4; ++d) {
        DirectedPrimalEdge e{center, static_cast<Dir>(d)};
        if (in_window(e.head())) queue.push_back(e);
    }
    auto reveal_index = [&](const DirectedPrimalEdge& e) {
        return static_cast<std::size_t>(window.rank(e.tail.x, e.tail.y)) * 4 +
               static_cast<std::size_t>(e.dir);
    };
    while (!queue.empty()) {
        DirectedPrimalEdge e = queue.front();
        queue.pop_front();
        DirectedPrimalEdge rev{e.head(), opposite(e.dir)};
        if (revealed[reveal_index(rev)]) continue;
        if (revealed[reveal_index(e)]) continue;
        revealed[reveal_index(e)] = 1;
        bool state = directed_open(e.tail, e.dir);
        auto [ci, via_reverse] = canon_index(e.tail, e.dir);
        out.undirected_open[ci] = state ? 1 : 0;
        out.consulted[ci] = via_reverse ? 2 : 1;
        if (state && !visited.count(e.head())) {
            visited.insert(e.head());
            out.forward_set.push_back(e.head());
            for (int d = 0; d < 4; ++d) {
                DirectedPrimalEdge ne{e.head(), static_cast<Dir>(d)};
                if (in_window(ne.head())) queue.push_back(ne);
            }
        }
    }

    // Unexplored undirected edges copy the uniform of their canonical
    // (lexicographically smaller tail) direction.
    for (long long r = 0; r < n; ++r) {
        int x = window.cx - window.radius + static_cast<int>(r % window.side());
        int y = window.cy - window.radius + static_cast<int>(r / window.side());
        for (int k = 0; k < 2; ++k) {
            Dir dir = k == 0 ? Dir::E : Dir::N;
            DirectedPrimalEdge e{{x, y}, dir};
            if (!in_window(e.head())) continue;
            std::size_t ci = static_cast<std::size_t>(r) * 2 + k;
            DirectedPrimalEdge rev{e.head(), opposite(dir)};
            if (!revealed[reveal_index(e)] && !revealed[reveal_index(rev)])
                out.undirected_open[ci] = directed_open({x, y}, dir) ? 1 : 0;
        }
    }

    // Undirected cluster of the center.
    std::unordered_set<PrimalVertex, PointHash> cvis;
    std::vector<PrimalVertex> stack{center};
    cvis.insert(center);
    while (!stack.empty()) {
        PrimalVertex v = stack.back();
        stack.pop_back();
        out.cluster.push_back(v);
        for (int d = 0; d < 4; ++d) {
            PrimalVertex h{v.x + kDirDx[d], v.y + kDirDy[d]};
            if (!in_window(h) || cvis.count(h)) continue;
            auto [ci, rev] = canon_index(v, static_cast<Dir>(d));
            (void)rev;
            if (!out.undirected_open[ci]) continue;
            cvis.insert(h);
            stack.push_back(h);
        }
    }
    return out;
}

}  // namespace neighperc
