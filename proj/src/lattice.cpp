#include "neighperc/lattice.hpp"

#include <algorithm>
#include <limits>

namespace neighperc {

PointSet fill(const PointSet& a) {
    if (a.empty()) throw std::invalid_argument("fill: empty input");

    int min_x = std::numeric_limits<int>::max(), max_x = std::numeric_limits<int>::min();
    int min_y = min_x, max_y = max_x;
    for (const DualVertex& v : a) {
        min_x = std::min(min_x, v.a);
        max_x = std::max(max_x, v.a);
        min_y = std::min(min_y, v.b);
        max_y = std::max(max_y, v.b);
    }
    // Bounding box with margin 1; the margin ring is entirely outside A and
    // connects every exterior cell.
    min_x -= 1;
    min_y -= 1;
    max_x += 1;
    max_y += 1;
    const int w = max_x - min_x + 1;
    const int h = max_y - min_y + 1;
    auto idx = [&](int x, int y) { return (y - min_y) * w + (x - min_x); };

    std::vector<std::uint8_t> member(static_cast<std::size_t>(w) * h, 0);
    for (const DualVertex& v : a) member[idx(v.a, v.b)] = 1;

    std::vector<std::uint8_t> outside(static_cast<std::size_t>(w) * h, 0);
    std::vector<std::pair<int, int>> stack;
    stack.emplace_back(min_x, min_y);
    outside[idx(min_x, min_y)] = 1;
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        for (int d = 0; d < 4; ++d) {
            int nx = x + kDirDx[d], ny = y + kDirDy[d];
            if (nx < min_x || nx > max_x || ny < min_y || ny > max_y) continue;
            std::size_t i = idx(nx, ny);
            if (member[i] || outside[i]) continue;
            outside[i] = 1;
            stack.emplace_back(nx, ny);
        }
    }

    PointSet result;
    result.reserve(a.size() * 2);
    for (int y = min_y; y <= max_y; ++y)
        for (int x = min_x; x <= max_x; ++x)
            if (!outside[idx(x, y)]) result.insert(DualVertex{x, y});
    return result;
}

WindingClass winding_class(const DirectedDualEdge& e1, const DirectedDualEdge& e2,
                           const DirectedDualEdge& e3) {
    if (!(e1.head() == e2.tail) || !(e2.head() == e3.tail))
        throw std::invalid_argument("winding_class: edges not consecutive");
    const bool left = e2.dir == rotate_ccw(e1.dir) && e3.dir == rotate_ccw(e2.dir);
    const bool right = e2.dir == rotate_cw(e1.dir) && e3.dir == rotate_cw(e2.dir);
    if (left) return WindingClass::LeftWinding;
    if (right) return WindingClass::RightWinding;
    return WindingClass::Neither;
}

}  // namespace neighperc
