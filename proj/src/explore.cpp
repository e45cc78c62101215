#include "neighperc/explore.hpp"

#include <algorithm>
#include <deque>

namespace neighperc {

PrimalForwardSetResult forward_set(const Configuration& config, PrimalVertex x,
                                   const Window& window) {
    if (!window.contains(x)) throw std::invalid_argument("forward_set: source outside window");
    PrimalForwardSetResult out;
    std::unordered_set<PrimalVertex, PointHash> seen;
    std::deque<PrimalVertex> queue{x};
    seen.insert(x);
    while (!queue.empty()) {
        PrimalVertex v = queue.front();
        queue.pop_front();
        out.vertices.push_back(v);
        if (window.on_boundary(v.x, v.y)) {
            out.escaped = true;
            continue;
        }
        VertexOutcome m = config.outcome_at(v);
        for (int d = 0; d < 4; ++d) {
            if (!outcome_has(m, d)) continue;
            PrimalVertex h{v.x + kDirDx[d], v.y + kDirDy[d]};
            if (seen.insert(h).second) queue.push_back(h);
        }
    }
    return out;
}

ForwardSetResult forward_set_dual(const Configuration& config, DualVertex x,
                                  const Window& window) {
    if (!window.dual_safe(x)) throw std::invalid_argument("forward_set_dual: source unsafe");
    ForwardSetResult out;
    PointSet seen;
    std::deque<DualVertex> queue{x};
    seen.insert(x);
    while (!queue.empty()) {
        DualVertex v = queue.front();
        queue.pop_front();
        out.vertices.push_back(v);
        if (!window.dual_safe(v)) {
            out.escaped = true;
            continue;
        }
        for (int d = 0; d < 4; ++d) {
            DirectedDualEdge e{v, static_cast<Dir>(d)};
            if (!config.dual_open(e)) continue;
            DualVertex h = e.head();
            if (seen.insert(h).second) queue.push_back(h);
        }
    }
    return out;
}

namespace {

template <typename Lookup>
bool pivotal_against(const Lookup& revealed_closed, const DirectedDualEdge& e) {
    SquareSiblings sib = square_siblings(e);
    return revealed_closed(sib.north) || revealed_closed(sib.west) || revealed_closed(sib.south);
}

}  // namespace

bool is_pivotal(const RevealedMap& history, const DirectedDualEdge& e) {
    if (history.count(e)) throw std::invalid_argument("is_pivotal: edge already revealed");
    auto closed = [&](const DirectedDualEdge& s) {
        auto it = history.find(s);
        return it != history.end() && !it->second;
    };
    return pivotal_against(closed, e);
}

bool classify_auto_open(const RevealedMap& history, const DirectedDualEdge& e,
                        const ModelSpec& spec) {
    if (spec.family != ModelSpec::Family::Corner)
        throw std::invalid_argument("classify_auto_open: corner model only");
    if (!is_pivotal(history, e))
        throw std::invalid_argument("classify_auto_open: edge is not pivotal");
    auto it = history.find(square_siblings(e).west);
    return it != history.end() && !it->second;
}

namespace {

// Dense per-run exploration state over a padded dual coordinate box.
class Explorer {
public:
    Explorer(const Configuration& config, DualVertex start, const Window& window)
        : config_(config), window_(window), start_(start) {
        lo_a_ = window.cx - window.radius - 2;
        lo_b_ = window.cy - window.radius - 2;
        side_ = window.side() + 5;
        reveal_.assign(static_cast<std::size_t>(side_) * side_ * 4, 0);
    }

    ExplorationRecord run() {
        ExplorationRecord rec;
        rec.start = start_;
        visited_.insert(start_);
        rec.visited.push_back(start_);
        fill_cache_ = fill(visited_);

        // Reversed storage: the front of the paper's list is list_.back().
        list_.clear();
        for (int d = 3; d >= 0; --d) list_.push_back({start_, static_cast<Dir>(d)});

        const bool corner = config_.spec.family == ModelSpec::Family::Corner;
        int step = 0;
        while (!list_.empty()) {
            DirectedDualEdge e = list_.back();
            ++step;

            bool piv = pivotal_against(
                [&](const DirectedDualEdge& s) { return reveal_state(s) == 2; }, e);
            bool open = config_.dual_open(e);
            set_reveal(e, open ? 1 : 2);
            rec.steps.push_back({e, open});
            if (piv) {
                bool auto_open = false;
                if (corner) {
                    auto_open = reveal_state(square_siblings(e).west) == 2;
                }
                rec.pivotal_times.push_back(step);
                rec.pivotal_events.push_back(
                    {step, e, open, auto_open, static_cast<int>(list_.size())});
            }

            list_.pop_back();
            if (!open) continue;

            DualVertex y = e.head();
            visited_.insert(y);
            rec.visited.push_back(y);
            if (!window_.dual_safe(y)) {
                rec.termination = Termination::WindowEscaped;
                rec.clusters = decompose(rec);
                return rec;
            }
            // Successors of y ordered by increasing det with the incoming
            // direction: right turn, straight, left turn. Right turn must be
            // explored next, so it is pushed last in the reversed storage.
            list_.push_back({y, rotate_ccw(e.dir)});
            list_.push_back({y, e.dir});
            list_.push_back({y, rotate_cw(e.dir)});

            fill_cache_ = fill(visited_);
            clean_list();
        }
        rec.termination = Termination::Stopped;
        rec.clusters = decompose(rec);
        return rec;
    }

private:
    int reveal_state(const DirectedDualEdge& e) const {
        return reveal_[edge_index(e)];
    }
    void set_reveal(const DirectedDualEdge& e, int s) {
        reveal_[edge_index(e)] = static_cast<std::uint8_t>(s);
    }
    std::size_t edge_index(const DirectedDualEdge& e) const {
        std::size_t cell = static_cast<std::size_t>(e.tail.b - lo_b_) * side_ +
                           static_cast<std::size_t>(e.tail.a - lo_a_);
        return cell * 4 + static_cast<std::size_t>(e.dir);
    }

    // Rules 1 and 2 in one pass: drop edges whose head already lies in
    // Fill(visited); visited is a subset of its fill.
    void clean_list() {
        auto drop = [&](const DirectedDualEdge& e) { return fill_cache_.count(e.head()) > 0; };
        list_.erase(std::remove_if(list_.begin(), list_.end(), drop), list_.end());
    }

    const Configuration& config_;
    Window window_;
    DualVertex start_;
    int lo_a_ = 0, lo_b_ = 0, side_ = 0;
    std::vector<std::uint8_t> reveal_;  // 0 unrevealed, 1 open, 2 closed
    std::vector<DirectedDualEdge> list_;
    PointSet visited_;
    PointSet fill_cache_;
};

}  // namespace

ExplorationRecord explore_dual_forward(const Configuration& config, DualVertex x,
                                       const Window& window) {
    if (!window.dual_safe(x))
        throw std::invalid_argument("explore_dual_forward: start too close to boundary");
    Explorer ex(config, x, window);
    return ex.run();
}

std::vector<std::vector<DualVertex>> decompose(const ExplorationRecord& record) {
    // Segment boundaries are the pivotal times; there are open_pivotal+1
    // segments. Cluster k collects the tails of the edges explored in segment
    // k, the entry vertex (head of the previous open pivotal edge) for k >= 2,
    // and any vertex first visited in segment k whose pending edges were all
    // cleaned before exploration (it never became a tail).
    const int segments = record.open_pivotal_count() + 1;
    std::vector<std::vector<DualVertex>> clusters(segments);
    std::vector<PointSet> members(segments);
    auto add = [&](int k, DualVertex v) {
        if (members[k].insert(v).second) clusters[k].push_back(v);
    };

    auto segment_of_step = [&](int step) {
        int k = 0;
        for (const auto& ev : record.pivotal_events) {
            if (ev.open && step > ev.step) ++k;
        }
        return k;
    };

    PointSet tails_or_entries;
    for (int i = 0; i < static_cast<int>(record.steps.size()); ++i) {
        int k = segment_of_step(i + 1);
        add(k, record.steps[i].edge.tail);
        tails_or_entries.insert(record.steps[i].edge.tail);
    }
    int k = 1;
    for (const auto& ev : record.pivotal_events) {
        if (!ev.open) continue;
        DualVertex entry = ev.edge.head();
        if (k < segments) add(k, entry);
        tails_or_entries.insert(entry);
        ++k;
    }
    // Orphaned heads: visited but never explored from.
    for (std::size_t i = 0; i < record.steps.size(); ++i) {
        const StepRecord& s = record.steps[i];
        if (!s.open) continue;
        DualVertex head = s.edge.head();
        if (tails_or_entries.count(head)) continue;
        add(segment_of_step(static_cast<int>(i + 1)), head);
    }
    if (clusters[0].empty()) add(0, record.start);
    return clusters;
}

}  // namespace neighperc
