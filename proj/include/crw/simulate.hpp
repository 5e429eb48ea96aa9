#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "crw/graph.hpp"
#include "crw/rng.hpp"

namespace crw {

using Steps = std::uint64_t;

/// Default simulation cap, 50 n^3 steps.
Steps default_cap(std::size_t n) noexcept;

/// Lazy move of a walk on `v` driven by one 64-bit draw: the top bit decides
/// whether to stay, the remaining 63 bits pick a neighbour.
inline Vertex lazy_move(const Graph& g, Vertex v, std::uint64_t bits) noexcept {
    const std::uint32_t deg = g.degree(v);
    if ((bits >> 63) != 0 || deg == 0) {
        return v;
    }
    return g.neighbors(v)[rng::scale63(bits & 0x7fffffffffffffffULL, deg)];
}

struct SimSample {
    Steps value = 0;
    bool censored = false;
    std::uint64_t seed = 0;
    /// (t, |S_t|) at t = 0, at powers of two, and at the final step.
    std::vector<std::pair<Steps, std::size_t>> trajectory;
};

/// Walks tagged with ids, stepped synchronously with merging on co-location.
///
/// Ids are positions in the initial vertex list. Ids in the immortal group
/// never die: when any immortal walk arrives at a vertex, every immortal walk
/// arriving there survives and every mortal arrival is removed; when only
/// mortal walks arrive, the smallest id survives. With the immortal group
/// {0} this is exactly the standard coalescing process with min-id survivor.
///
/// Step t draws, for the smallest-id walk on each occupied vertex v, the key
/// (seed, t, v); any further (necessarily immortal) walk on v draws
/// (seed, t, n + id). Two ensembles started from the same vertices and seed
/// therefore move their lowest walk on every shared vertex identically.
class Ensemble {
public:
    struct Walk {
        Vertex at;
        std::uint32_t id;
    };

    Ensemble(const Graph& g, std::span<const Vertex> start, std::span<const std::uint32_t> immortal,
             std::uint64_t seed);

    /// Standard coalescing process (immortal group {0}).
    Ensemble(const Graph& g, std::span<const Vertex> start, std::uint64_t seed);

    void step();

    Steps t() const noexcept { return t_; }
    std::size_t size() const noexcept { return walks_.size(); }
    std::size_t mortal_count() const noexcept { return mortal_; }
    /// Active walks ordered by id.
    std::span<const Walk> walks() const noexcept { return walks_; }
    std::size_t occupied_vertices() const;

private:
    const Graph* g_;
    std::uint64_t seed_;
    Steps t_ = 0;
    std::vector<Walk> walks_;
    std::vector<std::uint8_t> immortal_;  // by id
    std::vector<Steps> source_stamp_;     // by vertex
    std::vector<Steps> immortal_stamp_;   // by vertex
    std::vector<Steps> mortal_stamp_;     // by vertex
    std::vector<Vertex> dest_;
    std::size_t mortal_ = 0;
};

SimSample simulate_meeting(const Graph& g, Vertex u, Vertex v, std::uint64_t seed, Steps cap);

/// Meeting time from two independent stationary starts drawn with `seed`.
SimSample simulate_meeting_stationary(const Graph& g, std::uint64_t seed, Steps cap);

/// T_coal(S0). An empty `start` means one walk on every vertex.
SimSample simulate_coalescence(const Graph& g, std::span<const Vertex> start, std::uint64_t seed,
                               Steps cap, bool record_trajectory = false);

/// Synchronous voter model from n distinct opinions. In the lazy variant each
/// node keeps its opinion with probability 1/2, otherwise copies a uniform
/// neighbour's previous-round opinion.
SimSample simulate_voter(const Graph& g, std::uint64_t seed, Steps cap, bool lazy = true,
                         bool record_trajectory = false);

enum class ImmortalStop {
    /// First t with at most k walks left.
    at_most_walks,
    /// First t with at most k mortal ids left.
    at_most_mortal,
};

SimSample simulate_immortal(const Graph& g, std::span<const Vertex> start,
                            std::span<const std::uint32_t> immortal, std::size_t target_k,
                            std::uint64_t seed, Steps cap,
                            ImmortalStop stop = ImmortalStop::at_most_walks,
                            bool record_trajectory = false);

// ---------------------------------------------------------------------------
// Ensemble estimation

enum class SimKind { meeting, meeting_stationary, coalescence, voter, immortal };

std::string_view to_string(SimKind k) noexcept;
SimKind sim_kind_from_string(std::string_view s);

struct SimParams {
    SimKind kind = SimKind::coalescence;
    /// meeting: start pair.
    Vertex u = 0;
    Vertex v = 0;
    /// coalescence / immortal: start set (empty = all vertices).
    std::vector<Vertex> start;
    /// immortal: immortal ids and stopping rule.
    std::vector<std::uint32_t> immortal;
    std::size_t target_k = 1;
    ImmortalStop stop = ImmortalStop::at_most_walks;
    /// voter: lazy (dual to the lazy coalescing walk) or plain.
    bool lazy_voter = true;
};

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
    std::size_t trials = 0;
    std::size_t censored_count = 0;
    /// Set when any trial hit the cap (those samples are excluded from mean).
    bool censored_warning = false;

    bool overlaps(const Estimate& other) const noexcept {
        return ci95_lo <= other.ci95_hi && other.ci95_lo <= ci95_hi;
    }
};

/// One sample of `params.kind` with the given per-trial seed.
SimSample run_trial(const Graph& g, const SimParams& params, std::uint64_t seed, Steps cap);

/// Runs `trials` independent samples with seed trial_seed(master_seed, i),
/// in parallel, and aggregates them in trial order.
Estimate estimate(const Graph& g, const SimParams& params, std::size_t trials,
                  std::uint64_t master_seed, Steps cap);

/// Per-trial samples in trial order (the raw material of `estimate`).
std::vector<SimSample> sample(const Graph& g, const SimParams& params, std::size_t trials,
                              std::uint64_t master_seed, Steps cap);

/// Mean, standard error and normal 95% interval of the uncensored samples.
Estimate summarize(std::span<const SimSample> samples);

/// Pairwise (cascade) summation; the result depends only on the order of `x`.
double pairwise_sum(std::span<const double> x) noexcept;

} // namespace crw
