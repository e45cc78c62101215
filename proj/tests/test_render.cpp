#include <doctest.h>

#include <fstream>
#include <sstream>

#include "neighperc/render.hpp"

using namespace neighperc;

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("empty exploration renders the origin marker and four dashed arrows") {
    Window w{0, 0, 3};
    Configuration full = sample_configuration(ModelSpec::iid(Rat(1)), w, 2);
    ExplorationRecord rec = explore_dual_forward(full, {0, 0}, w);
    std::string svg = render_exploration_svg(full, rec);
    CHECK(count_occurrences(svg, "stroke-dasharray") == 4);
    CHECK(count_occurrences(svg, "#d62728") == 1);  // start marker
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);

    // Byte-determinism.
    CHECK(render_exploration_svg(full, rec) == svg);
}

TEST_CASE("corner configurations render one arrow pair per in-window vertex") {
    Window w{0, 0, 4};
    Configuration cfg = sample_configuration(ModelSpec::corner(Rat(1, 2)), w, 6);
    std::string svg = render_config_svg(cfg);
    long long expected = 0;
    for (int y = -4; y <= 4; ++y)
        for (int x = -4; x <= 4; ++x) {
            VertexOutcome m = cfg.outcome_at({x, y});
            CHECK(outcome_degree(m) == 2);
            for (int d = 0; d < 4; ++d) {
                DirectedPrimalEdge e{{x, y}, static_cast<Dir>(d)};
                if (outcome_has(m, d) && w.contains(e.head())) ++expected;
            }
        }
    CHECK(count_occurrences(svg, "<line") == static_cast<std::size_t>(expected));
}

TEST_CASE("exploration render matches the golden file byte for byte") {
    ModelSpec spec = ModelSpec::two_eps(Rat(0));
    Window w{0, 0, 16};
    Configuration cfg = sample_configuration(spec, w, 5);
    ExplorationRecord rec = explore_dual_forward(cfg, {0, 0}, w);
    std::string svg = render_exploration_svg(cfg, rec);

    std::string golden_path = std::string(NEIGHPERC_GOLDEN_DIR) + "/explore_r16_seed5.svg";
    std::string golden = read_file(golden_path);
    CHECK(svg == golden);
}

TEST_CASE("oversized windows are rejected") {
    Window w{0, 0, 129};
    Configuration cfg{w, ModelSpec::iid(Rat(0)), 0, {}};
    cfg.outcomes.assign(static_cast<std::size_t>(w.vertex_count()), 0);
    CHECK_THROWS_AS(render_config_svg(cfg), std::domain_error);
}
