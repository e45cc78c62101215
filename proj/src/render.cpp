#include "neighperc/render.hpp"

#include <sstream>

namespace neighperc {

namespace {

constexpr int kScale = 24;   // pixels per lattice unit (even: half-units stay integral)
constexpr int kMargin = 24;

struct Canvas {
    const Window& window;
    std::ostringstream out;

    explicit Canvas(const Window& w) : window(w) {
        if (w.radius > 128) throw std::domain_error("render: window radius over 128");
        out.imbue(std::locale::classic());
        int size = w.side() * kScale + 2 * kMargin;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
            << size << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
        out << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
    }

    // Primal vertex (x,y) in pixels; y axis flipped.
    std::pair<int, int> primal_px(int x, int y) const {
        int px = (x - (window.cx - window.radius)) * kScale + kMargin;
        int py = ((window.cy + window.radius) - y) * kScale + kMargin;
        return {px, py};
    }
    // Dual vertex (a,b) sits at (a+1/2, b+1/2).
    std::pair<int, int> dual_px(int a, int b) const {
        auto [px, py] = primal_px(a, b);
        return {px + kScale / 2, py - kScale / 2};
    }

    void arrow(int x1, int y1, int x2, int y2, const char* color, int width, bool dashed) {
        out << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
            << "\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"";
        if (dashed) out << " stroke-dasharray=\"4 3\"";
        out << "/>\n";
        // Arrowhead: small triangle at the head, axis-aligned.
        int dx = (x2 > x1) - (x2 < x1);
        int dy = (y2 > y1) - (y2 < y1);
        int s = 4;
        int bx = x2 - dx * 2 * s, by = y2 - dy * 2 * s;
        out << "<polygon points=\"" << x2 << "," << y2 << " " << (bx - dy * s) << ","
            << (by - dx * s) << " " << (bx + dy * s) << "," << (by + dx * s)
            << "\" fill=\"" << color << "\"/>\n";
    }

    void circle(int x, int y, int r, const char* fill) {
        out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\"" << fill
            << "\"/>\n";
    }

    void square(int cx, int cy, int half, const char* fill, const char* opacity) {
        out << "<rect x=\"" << (cx - half) << "\" y=\"" << (cy - half) << "\" width=\""
            << 2 * half << "\" height=\"" << 2 * half << "\" fill=\"" << fill
            << "\" fill-opacity=\"" << opacity << "\"/>\n";
    }

    std::string finish() {
        out << "</svg>\n";
        return out.str();
    }
};

// Shortened edge endpoints so arrowheads stay clear of the vertex dots.
void draw_primal_edge(Canvas& canvas, const DirectedPrimalEdge& e, const char* color, int width) {
    auto [x1, y1] = canvas.primal_px(e.tail.x, e.tail.y);
    PrimalVertex h = e.head();
    auto [x2, y2] = canvas.primal_px(h.x, h.y);
    int dx = (x2 > x1) - (x2 < x1), dy = (y2 > y1) - (y2 < y1);
    canvas.arrow(x1 + dx * 4, y1 + dy * 4, x2 - dx * 4, y2 - dy * 4, color, width, false);
}

void draw_dual_edge(Canvas& canvas, const DirectedDualEdge& e, const char* color, int width,
                    bool dashed) {
    auto [x1, y1] = canvas.dual_px(e.tail.a, e.tail.b);
    DualVertex h = e.head();
    auto [x2, y2] = canvas.dual_px(h.a, h.b);
    int dx = (x2 > x1) - (x2 < x1), dy = (y2 > y1) - (y2 < y1);
    canvas.arrow(x1 + dx * 3, y1 + dy * 3, x2 - dx * 3, y2 - dy * 3, color, width, dashed);
}

void draw_configuration(Canvas& canvas, const Configuration& config) {
    const Window& w = config.window;
    for (int y = w.cy - w.radius; y <= w.cy + w.radius; ++y)
        for (int x = w.cx - w.radius; x <= w.cx + w.radius; ++x) {
            auto [px, py] = canvas.primal_px(x, y);
            canvas.circle(px, py, 2, "#c8c8c8");
        }
    for (int y = w.cy - w.radius; y <= w.cy + w.radius; ++y)
        for (int x = w.cx - w.radius; x <= w.cx + w.radius; ++x) {
            VertexOutcome m = config.outcome_at({x, y});
            for (int d = 0; d < 4; ++d) {
                if (!outcome_has(m, d)) continue;
                DirectedPrimalEdge e{{x, y}, static_cast<Dir>(d)};
                if (!w.contains(e.head())) continue;
                draw_primal_edge(canvas, e, "#555555", 2);
            }
        }
}

const char* kClusterPalette[6] = {"#1f77b4", "#2ca02c", "#9467bd",
                                  "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_config_svg(const Configuration& config) {
    Canvas canvas(config.window);
    draw_configuration(canvas, config);
    auto [ox, oy] = canvas.primal_px(config.window.cx, config.window.cy);
    canvas.circle(ox, oy, 5, "#d62728");
    return canvas.finish();
}

std::string render_exploration_svg(const Configuration& config,
                                   const ExplorationRecord& record) {
    Canvas canvas(config.window);
    draw_configuration(canvas, config);

    for (std::size_t k = 0; k < record.clusters.size(); ++k) {
        const char* color = kClusterPalette[k % 6];
        for (const DualVertex& v : record.clusters[k]) {
            auto [px, py] = canvas.dual_px(v.a, v.b);
            canvas.square(px, py, kScale * 2 / 5, color, "0.25");
        }
    }
    for (const StepRecord& s : record.steps)
        draw_dual_edge(canvas, s.edge, s.open ? "#1f77b4" : "#9aa5b1", s.open ? 3 : 2, !s.open);
    for (const PivotalEvent& ev : record.pivotal_events)
        draw_dual_edge(canvas, ev.edge, "#ff7f0e", 4, !ev.open);

    auto [sx, sy] = canvas.dual_px(record.start.a, record.start.b);
    canvas.circle(sx, sy, 5, "#d62728");
    return canvas.finish();
}

}  // namespace neighperc
