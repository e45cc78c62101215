#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "neighperc/models.hpp"

namespace neighperc {

// Forward sets and the depth-first counter-clockwise dual exploration with
// its two cleaning rules, pivotal-edge bookkeeping and visited-cluster
// decomposition.

struct ForwardSetResult {
    std::vector<DualVertex> vertices;  // visit order, starts with the source
    bool escaped = false;
};
struct PrimalForwardSetResult {
    std::vector<PrimalVertex> vertices;
    bool escaped = false;
};

// Breadth-first closure under open directed primal edges, truncated at the
// window boundary; escaped = some vertex at L-infinity distance == radius was
// reached. `window` may be a sub-window of config.window.
PrimalForwardSetResult forward_set(const Configuration& config, PrimalVertex x,
                                   const Window& window);

// Same on the dual lattice under the dual states. Expansion stops at dual
// vertices whose owning 2x2 primal block leaves the window.
ForwardSetResult forward_set_dual(const Configuration& config, DualVertex x,
                                  const Window& window);

enum class Termination { Stopped, WindowEscaped };

struct StepRecord {
    DirectedDualEdge edge;
    bool open = false;
};

struct PivotalEvent {
    int step = 0;  // 1-based step index of the reveal
    DirectedDualEdge edge;
    bool open = false;
    bool auto_open = false;  // corner model only
    int pending = 0;         // length of the to-explore list at reveal time
};

struct ExplorationRecord {
    DualVertex start;
    std::vector<StepRecord> steps;  // step n is steps[n-1]
    std::vector<DualVertex> visited;  // visit order, starts with start
    std::vector<PivotalEvent> pivotal_events;
    std::vector<int> pivotal_times;  // steps at which a pivotal edge was revealed
    std::vector<std::vector<DualVertex>> clusters;
    Termination termination = Termination::Stopped;

    int open_pivotal_count() const {
        int n = 0;
        for (const auto& ev : pivotal_events) n += ev.open ? 1 : 0;
        return n;
    }
};

using RevealedMap = std::unordered_map<DirectedDualEdge, bool, DualEdgeHash>;

// A dual edge about to be revealed is pivotal iff one of its square siblings
// is already revealed and closed. Throws if e itself is already revealed.
bool is_pivotal(const RevealedMap& history, const DirectedDualEdge& e);

// Corner-model refinement: a pivotal edge is open with conditional
// probability one exactly when the west sibling is revealed-and-closed.
bool classify_auto_open(const RevealedMap& history, const DirectedDualEdge& e,
                        const ModelSpec& spec);

// Runs the dual exploration of the forward set of x*: ordered edge list
// seeded with (E,N,W,S), three successor edges prepended right turn first,
// list cleaned against visited vertices and Fill of the visited set. Stops
// when the list empties or the exploration reaches the window boundary.
ExplorationRecord explore_dual_forward(const Configuration& config, DualVertex x,
                                       const Window& window);

// Splits the visited vertices at pivotal times into open_pivotal_count()+1
// disjoint clusters whose union is the visited set.
std::vector<std::vector<DualVertex>> decompose(const ExplorationRecord& record);

}  // namespace neighperc
