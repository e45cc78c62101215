#include <doctest.h>

#include <cmath>
#include <map>

#include "neighperc/explore.hpp"
#include "neighperc/models.hpp"

using namespace neighperc;

namespace {

Rat direction_marginal(const ModelSpec& spec, int dir) {
    Rat total(0);
    for (const auto& om : vertex_outcome_distribution(spec))
        if (outcome_has(om.outcome, dir)) total = rat_add(total, om.mass);
    return total;
}

Rat mass_of(const ModelSpec& spec, VertexOutcome m) {
    for (const auto& om : vertex_outcome_distribution(spec))
        if (om.outcome == m) return om.mass;
    return Rat(0);
}

}  // namespace

TEST_CASE("degree-two distributions") {
    // Two uniformly chosen neighbors: six pairs, each 1/6.
    auto dist = vertex_outcome_distribution(ModelSpec::two_eps(Rat(0)));
    CHECK(dist.size() == 6);
    for (const auto& om : dist) {
        CHECK(outcome_degree(om.outcome) == 2);
        CHECK(om.mass == Rat(1, 6));
    }

    // Corner pairs, each 1/4.
    auto corner = vertex_outcome_distribution(ModelSpec::corner(Rat(1, 2)));
    CHECK(corner.size() == 4);
    for (const auto& om : corner) {
        CHECK(outcome_degree(om.outcome) == 2);
        CHECK(om.mass == Rat(1, 4));
    }
    CHECK(mass_of(ModelSpec::corner(Rat(1, 2)), 0b0011) == Rat(1, 4));  // {E,N}

    // rho = 1/6 recovers the uniform degree-two law.
    auto iso = vertex_outcome_distribution(ModelSpec::iso_degree_two(Rat(1, 6)));
    CHECK(iso.size() == 6);
    for (const auto& om : iso) CHECK(om.mass == Rat(1, 6));

    // rho = 0: axis pairs only; rho = 1/4: corner pairs only.
    auto axes = vertex_outcome_distribution(ModelSpec::iso_degree_two(Rat(0)));
    Rat total(0);
    for (const auto& om : axes)
        if (om.outcome == 0b1010 || om.outcome == 0b0101) total = rat_add(total, om.mass);
    CHECK(total == Rat(1));
    CHECK(vertex_outcome_distribution(ModelSpec::iso_degree_two(Rat(1, 4))).size() == 4);
}

TEST_CASE("distribution masses sum to one exactly") {
    std::vector<ModelSpec> specs = {
        ModelSpec::two_eps(Rat(0)),          ModelSpec::two_eps(Rat(1, 5)),
        ModelSpec::k_neighbor(1, Rat(1, 3)), ModelSpec::k_neighbor(2, Rat(7, 20)),
        ModelSpec::k_neighbor(3, Rat(23, 100)), ModelSpec::k_neighbor(2, Rat(1)),
        ModelSpec::iid(Rat(3, 10)),          ModelSpec::all_or_none(Rat(3, 5)),
        ModelSpec::ns_ew(Rat(1, 2)),         ModelSpec::ns_ew(Rat(2, 5)),
        ModelSpec::ns_ew(Rat(13, 20)),       ModelSpec::corner(Rat(1, 2)),
        ModelSpec::corner(Rat(1, 5)),        ModelSpec::corner(Rat(3, 5)),
        ModelSpec::iso_degree_two(Rat(1, 8)),
    };
    for (const auto& spec : specs) {
        Rat total(0);
        for (const auto& om : vertex_outcome_distribution(spec)) {
            CHECK(om.mass.num >= 0);
            total = rat_add(total, om.mass);
        }
        CHECK(total == Rat(1));
    }
}

TEST_CASE("edge marginal equals p on a rational grid") {
    for (int i = 0; i <= 20; ++i) {
        Rat p(i, 20);
        CHECK(edge_marginal(ModelSpec::k_neighbor(2, p)) == p);
        CHECK(edge_marginal(ModelSpec::k_neighbor(3, p)) == p);
        CHECK(edge_marginal(ModelSpec::iid(p)) == p);
        CHECK(edge_marginal(ModelSpec::all_or_none(p)) == p);
        if (i < 15) {
            CHECK(edge_marginal(ModelSpec::ns_ew(p)) == p);
            CHECK(edge_marginal(ModelSpec::corner(p)) == p);
        }
    }
    // p = 1/2 + eps/4 for the planar degree-(2+eps) family.
    CHECK(edge_marginal(ModelSpec::two_eps(Rat(0))) == Rat(1, 2));
    CHECK(edge_marginal(ModelSpec::two_eps(Rat(1, 5))) == Rat(11, 20));
}

TEST_CASE("isotropy of the degree-two family is exact") {
    for (const auto& spec : {ModelSpec::two_eps(Rat(0)), ModelSpec::two_eps(Rat(3, 10)),
                             ModelSpec::iso_degree_two(Rat(1, 5))}) {
        Rat m0 = direction_marginal(spec, 0);
        for (int d = 1; d < 4; ++d) CHECK(direction_marginal(spec, d) == m0);
    }
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(ModelSpec::ns_ew(Rat(4, 5)), std::invalid_argument);
    CHECK_THROWS_AS(ModelSpec::corner(Rat(9, 10)), std::invalid_argument);
    CHECK_THROWS_AS(ModelSpec::iso_degree_two(Rat(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(ModelSpec::k_neighbor(2, Rat(5, 4)), std::invalid_argument);
    CHECK_THROWS_AS(ModelSpec::two_eps(Rat(1)), std::invalid_argument);
    CHECK(ModelSpec::two_eps(Rat(1, 5)).p == Rat(11, 20));
    CHECK(ModelSpec::two_eps(Rat(0)).stage_k() == 2);
    CHECK(ModelSpec::two_eps(Rat(1, 5)).stage_eps() == Rat(1, 5));
}

TEST_CASE("sampling is reproducible and honors the degree constraint") {
    Window w{0, 0, 6};
    ModelSpec spec = ModelSpec::two_eps(Rat(0));
    Configuration a = sample_configuration(spec, w, 42);
    Configuration b = sample_configuration(spec, w, 42);
    CHECK(a.outcomes == b.outcomes);
    Configuration c = sample_configuration(spec, w, 43);
    CHECK(a.outcomes != c.outcomes);
    for (VertexOutcome m : a.outcomes) CHECK(outcome_degree(m) == 2);

    Configuration full = sample_configuration(ModelSpec::iid(Rat(1)), w, 1);
    for (VertexOutcome m : full.outcomes) CHECK(m == 0b1111);
}

TEST_CASE("sampled outcome frequencies match the exact law") {
    // 4-sigma binomial band around each exact mass, 1e6 draws.
    const long long trials = 1000000;
    for (const auto& spec : {ModelSpec::corner(Rat(1, 2)), ModelSpec::two_eps(Rat(1, 5))}) {
        std::map<VertexOutcome, long long> counts;
        for (long long t = 0; t < trials; ++t) {
            SplitMix64 stream(derive(977, kStreamVertex, static_cast<std::uint64_t>(t)));
            ++counts[sample_vertex_outcome(spec, stream)];
        }
        long long seen = 0;
        for (const auto& om : vertex_outcome_distribution(spec)) {
            double p = om.mass.to_double();
            double sigma = std::sqrt(p * (1 - p) * trials);
            double c = static_cast<double>(counts[om.outcome]);
            seen += counts[om.outcome];
            CHECK(std::abs(c - p * trials) <= 4.0 * sigma + 1.0);
        }
        CHECK(seen == trials);  // all sampled outcomes are in the support
    }
}

TEST_CASE("monotone coupling contains the low configuration in the high one") {
    Window w{0, 0, 8};
    auto [a1, b1] = sample_coupled_monotone(ModelSpec::k_neighbor(2, Rat(9, 20)),
                                            ModelSpec::k_neighbor(2, Rat(9, 20)), w, 7);
    CHECK(a1.outcomes == b1.outcomes);

    auto [lo, hi] = sample_coupled_monotone(ModelSpec::k_neighbor(2, Rat(0)),
                                            ModelSpec::k_neighbor(2, Rat(1)), w, 8);
    for (std::size_t i = 0; i < lo.outcomes.size(); ++i) {
        CHECK(lo.outcomes[i] == 0);
        CHECK(hi.outcomes[i] == 0b1111);
    }

    long long violations = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        auto [a, b] = sample_coupled_monotone(ModelSpec::k_neighbor(2, Rat(9, 20)),
                                              ModelSpec::k_neighbor(2, Rat(11, 20)), w, seed);
        for (std::size_t i = 0; i < a.outcomes.size(); ++i)
            if ((a.outcomes[i] & ~b.outcomes[i]) != 0) ++violations;
    }
    CHECK(violations == 0);

    // The low leg of the coupling is the plain sampler, bit for bit.
    auto [lo2, hi2] = sample_coupled_monotone(ModelSpec::k_neighbor(2, Rat(9, 20)),
                                              ModelSpec::k_neighbor(2, Rat(11, 20)), w, 99);
    CHECK(lo2.outcomes == sample_configuration(ModelSpec::k_neighbor(2, Rat(9, 20)), w, 99).outcomes);
    CHECK(hi2.outcomes == sample_configuration(ModelSpec::k_neighbor(2, Rat(11, 20)), w, 99).outcomes);

    CHECK_THROWS_AS(sample_coupled_monotone(ModelSpec::k_neighbor(2, Rat(3, 5)),
                                            ModelSpec::k_neighbor(2, Rat(2, 5)), w, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_coupled_monotone(ModelSpec::iid(Rat(1, 4)),
                                            ModelSpec::iid(Rat(1, 2)), w, 1),
                    std::invalid_argument);
}

TEST_CASE("all-or-none maps to site percolation") {
    Window w{0, 0, 4};
    Configuration c = sample_configuration(ModelSpec::all_or_none(Rat(3, 5)), w, 11);
    auto site = aon_to_site(c);
    for (std::size_t i = 0; i < site.size(); ++i)
        CHECK(site[i] == (c.outcomes[i] == 0b1111 ? 1 : 0));
    CHECK_THROWS_AS(aon_to_site(sample_configuration(ModelSpec::iid(Rat(1, 2)), w, 1)),
                    std::invalid_argument);

    // Empirical site density at p = 0.6 within 4 sigma over 1e6 draws.
    const long long trials = 1000000;
    long long open_count = 0;
    ModelSpec aon = ModelSpec::all_or_none(Rat(3, 5));
    for (long long t = 0; t < trials; ++t) {
        SplitMix64 stream(derive(5150, kStreamVertex, static_cast<std::uint64_t>(t)));
        if (sample_vertex_outcome(aon, stream) == 0b1111) ++open_count;
    }
    double sigma = std::sqrt(0.6 * 0.4 * trials);
    CHECK(std::abs(open_count - 0.6 * trials) <= 4.0 * sigma);
}

TEST_CASE("iid directed-undirected coupling") {
    Window w{0, 0, 8};
    auto zero = couple_iid_directed_undirected(Rat(0), w, 3);
    CHECK(zero.forward_set.size() == 1);
    CHECK(zero.cluster.size() == 1);

    auto one = couple_iid_directed_undirected(Rat(1), w, 3);
    CHECK(static_cast<long long>(one.forward_set.size()) == w.vertex_count());
    CHECK(static_cast<long long>(one.cluster.size()) == w.vertex_count());

    // Pathwise set equality and single-uniform consultation, many runs.
    Window w16{0, 0, 16};
    for (std::uint64_t seed = 0; seed < 1500; ++seed) {
        auto cp = couple_iid_directed_undirected(Rat(1, 2), w16, seed);
        PointSet fwd, cl;
        for (auto v : cp.forward_set) fwd.insert({v.x, v.y});
        for (auto v : cp.cluster) cl.insert({v.x, v.y});
        REQUIRE(fwd == cl);

        // The recorded consultation code must be consistent with the
        // directional uniforms it claims to have copied.
        for (long long r = 0; r < w16.vertex_count(); ++r) {
            int x = w16.cx - w16.radius + static_cast<int>(r % w16.side());
            int y = w16.cy - w16.radius + static_cast<int>(r / w16.side());
            for (int k = 0; k < 2; ++k) {
                PrimalVertex head{x + (k == 0 ? 1 : 0), y + (k == 1 ? 1 : 0)};
                if (!w16.contains(head)) continue;
                std::size_t ci = static_cast<std::size_t>(r) * 2 + k;
                Dir fwd_dir = k == 0 ? Dir::E : Dir::N;
                bool canon =
                    cp.directed_open[static_cast<std::size_t>(r) * 4 +
                                     static_cast<std::size_t>(fwd_dir)] != 0;
                bool rev = cp.directed_open[static_cast<std::size_t>(
                               w16.rank(head.x, head.y)) * 4 +
                           static_cast<std::size_t>(opposite(fwd_dir))] != 0;
                bool got = cp.undirected_open[ci] != 0;
                REQUIRE(cp.consulted[ci] <= 2);
                if (cp.consulted[ci] == 2)
                    REQUIRE(got == rev);
                else
                    REQUIRE(got == canon);
            }
        }
    }
}

TEST_CASE("coupled undirected layer is Bernoulli(p): chi-square over 1e6 edges") {
    Window w{0, 0, 16};
    long long edges = 0, open_count = 0;
    std::uint64_t seed = 0;
    while (edges < 1000000) {
        auto cp = couple_iid_directed_undirected(Rat(1, 2), w, 1000 + seed++);
        for (long long r = 0; r < w.vertex_count(); ++r) {
            int x = w.cx - w.radius + static_cast<int>(r % w.side());
            int y = w.cy - w.radius + static_cast<int>(r / w.side());
            for (int k = 0; k < 2; ++k) {
                PrimalVertex head{x + (k == 0 ? 1 : 0), y + (k == 1 ? 1 : 0)};
                if (!w.contains(head)) continue;
                ++edges;
                open_count += cp.undirected_open[static_cast<std::size_t>(r) * 2 + k];
            }
        }
    }
    double expected = 0.5 * static_cast<double>(edges);
    double chi2 = (open_count - expected) * (open_count - expected) / expected +
                  (edges - open_count - expected) * (edges - open_count - expected) / expected;
    CHECK(chi2 < 10.828);  // 1-df quantile at 1e-3
}

TEST_CASE("debug text grid uses direction masks") {
    Window w{0, 0, 1};
    std::vector<VertexOutcome> masks(9, 0b0011);  // E and N everywhere
    Configuration c = configuration_from_masks(ModelSpec::two_eps(Rat(0)), w, masks);
    std::string text = c.debug_text();
    CHECK(text.find("EN--") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("rational parsing and arithmetic") {
    CHECK(parse_rat("3/20") == Rat(3, 20));
    CHECK(parse_rat("0.15") == Rat(3, 20));
    CHECK(parse_rat("7") == Rat(7));
    CHECK(rat_add(Rat(1, 6), Rat(1, 3)) == Rat(1, 2));
    CHECK(rat_mul(Rat(2, 3), Rat(3, 4)) == Rat(1, 2));
    CHECK(rat_sub(Rat(1, 2), Rat(1, 5)) == Rat(3, 10));
    CHECK(Rat(1, 3) < Rat(1, 2));
    CHECK_THROWS_AS(Rat(1, 0), std::invalid_argument);
}
