#include "crw/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "crw/errors.hpp"
#include "crw/parallel.hpp"

namespace crw {

namespace {

bool is_checkpoint(Steps t) noexcept { return t == 0 || (t & (t - 1)) == 0; }

void check_start(const Graph& g, std::span<const Vertex> start) {
    if (start.empty()) {
        throw std::invalid_argument("start set must be non-empty");
    }
    std::vector<std::uint8_t> seen(g.n(), 0);
    for (Vertex v : start) {
        if (v >= g.n()) {
            throw std::out_of_range("start vertex " + std::to_string(v) + " out of range");
        }
        if (seen[v]++) {
            throw std::invalid_argument("start vertices must be distinct");
        }
    }
}

std::vector<Vertex> all_vertices(const Graph& g) {
    std::vector<Vertex> v(g.n());
    for (Vertex i = 0; i < g.n(); ++i) {
        v[i] = i;
    }
    return v;
}

// Steps `advance` until `done` holds or `cap` steps elapse.
template <class Done, class Advance, class Count>
SimSample run_until(std::uint64_t seed, Steps cap, bool record, Done done, Advance advance,
                    Count count) {
    SimSample s;
    s.seed = seed;
    Steps t = 0;
    if (record) {
        s.trajectory.emplace_back(0, count());
    }
    while (!done()) {
        if (t >= cap) {
            s.censored = true;
            break;
        }
        advance();
        ++t;
        if (record && is_checkpoint(t)) {
            s.trajectory.emplace_back(t, count());
        }
    }
    s.value = t;
    if (record && (s.trajectory.empty() || s.trajectory.back().first != t)) {
        s.trajectory.emplace_back(t, count());
    }
    return s;
}

constexpr double kZ95 = 1.959963984540054;

} // namespace

Steps default_cap(std::size_t n) noexcept {
    const Steps nn = std::max<Steps>(n, 2);
    return 50 * nn * nn * nn;
}

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(const Graph& g, std::span<const Vertex> start,
                   std::span<const std::uint32_t> immortal, std::uint64_t seed)
    : g_(&g), seed_(seed), immortal_(start.size(), 0), source_stamp_(g.n(), 0),
      immortal_stamp_(g.n(), 0), mortal_stamp_(g.n(), 0), dest_(start.size()) {
    check_start(g, start);
    for (std::uint32_t id : immortal) {
        if (id >= start.size()) {
            throw InvalidIds("immortal id " + std::to_string(id) + " not among the " +
                             std::to_string(start.size()) + " start walks");
        }
        immortal_[id] = 1;
    }
    walks_.reserve(start.size());
    for (std::uint32_t id = 0; id < start.size(); ++id) {
        walks_.push_back({start[id], id});
        mortal_ += immortal_[id] ? 0 : 1;
    }
}

Ensemble::Ensemble(const Graph& g, std::span<const Vertex> start, std::uint64_t seed)
    : Ensemble(g, start, std::array<std::uint32_t, 1>{0}, seed) {}

void Ensemble::step() {
    const Steps stamp = t_ + 1;
    const std::uint64_t n = g_->n();
    for (std::size_t i = 0; i < walks_.size(); ++i) {
        const Walk w = walks_[i];
        std::uint64_t bits;
        if (source_stamp_[w.at] != stamp) {
            source_stamp_[w.at] = stamp;
            bits = rng::keyed(seed_, t_, w.at);
        } else {
            bits = rng::keyed(seed_, t_, n + w.id);
        }
        const Vertex d = lazy_move(*g_, w.at, bits);
        dest_[i] = d;
        if (immortal_[w.id]) {
            immortal_stamp_[d] = stamp;
        }
    }
    std::size_t kept = 0;
    for (std::size_t i = 0; i < walks_.size(); ++i) {
        const Vertex d = dest_[i];
        const std::uint32_t id = walks_[i].id;
        bool survives = true;
        if (!immortal_[id]) {
            if (immortal_stamp_[d] == stamp || mortal_stamp_[d] == stamp) {
                survives = false;
                --mortal_;
            } else {
                mortal_stamp_[d] = stamp;
            }
        }
        if (survives) {
            walks_[kept++] = {d, id};
        }
    }
    walks_.resize(kept);
    ++t_;
}

std::size_t Ensemble::occupied_vertices() const {
    std::vector<Vertex> at;
    at.reserve(walks_.size());
    for (const auto& w : walks_) {
        at.push_back(w.at);
    }
    std::sort(at.begin(), at.end());
    return static_cast<std::size_t>(std::unique(at.begin(), at.end()) - at.begin());
}

// ---------------------------------------------------------------------------
// Single-trial simulators

SimSample simulate_meeting(const Graph& g, Vertex u, Vertex v, std::uint64_t seed, Steps cap) {
    if (cap < 1) {
        throw std::invalid_argument("cap must be >= 1");
    }
    if (u >= g.n() || v >= g.n()) {
        throw std::out_of_range("meeting start vertex out of range");
    }
    Vertex x = u;
    Vertex y = v;
    Steps t = 0;
    return run_until(
        seed, cap, false, [&] { return x == y; },
        [&] {
            x = lazy_move(g, x, rng::keyed(seed, t, x));
            y = lazy_move(g, y, rng::keyed(seed, t, y));
            ++t;
        },
        [] { return std::size_t{0}; });
}

SimSample simulate_meeting_stationary(const Graph& g, std::uint64_t seed, Steps cap) {
    const auto adj = g.adjacency();
    Vertex u = 0;
    Vertex v = 0;
    if (!adj.empty()) {
        // A uniform adjacency slot names vertex w with probability deg(w)/2m.
        rng::SplitMix64 gen(rng::keyed(seed, 0x7374617274));
        u = adj[gen.below(adj.size())];
        v = adj[gen.below(adj.size())];
    }
    SimSample s = simulate_meeting(g, u, v, seed, cap);
    s.seed = seed;
    return s;
}

SimSample simulate_coalescence(const Graph& g, std::span<const Vertex> start, std::uint64_t seed,
                               Steps cap, bool record_trajectory) {
    if (cap < 1) {
        throw std::invalid_argument("cap must be >= 1");
    }
    std::vector<Vertex> everyone;
    if (start.empty()) {
        everyone = all_vertices(g);
        start = everyone;
    }
    Ensemble e(g, start, seed);
    return run_until(
        seed, cap, record_trajectory, [&] { return e.size() <= 1; }, [&] { e.step(); },
        [&] { return e.size(); });
}

SimSample simulate_voter(const Graph& g, std::uint64_t seed, Steps cap, bool lazy,
                         bool record_trajectory) {
    if (cap < 1) {
        throw std::invalid_argument("cap must be >= 1");
    }
    const std::size_t n = g.n();
    std::vector<Vertex> opinion = all_vertices(g);
    std::vector<Vertex> next(n);
    std::vector<std::uint32_t> count(n, 1);
    std::size_t distinct = n;
    Steps t = 0;
    return run_until(
        seed, cap, record_trajectory, [&] { return distinct <= 1; },
        [&] {
            for (Vertex v = 0; v < n; ++v) {
                std::uint64_t bits = rng::keyed(seed, t, v);
                if (!lazy) {
                    bits &= 0x7fffffffffffffffULL;
                }
                next[v] = opinion[lazy_move(g, v, bits)];
            }
            std::fill(count.begin(), count.end(), 0);
            distinct = 0;
            for (Vertex v = 0; v < n; ++v) {
                distinct += count[next[v]]++ == 0 ? 1 : 0;
            }
            opinion.swap(next);
            ++t;
        },
        [&] { return distinct; });
}

SimSample simulate_immortal(const Graph& g, std::span<const Vertex> start,
                            std::span<const std::uint32_t> immortal, std::size_t target_k,
                            std::uint64_t seed, Steps cap, ImmortalStop stop,
                            bool record_trajectory) {
    if (cap < 1) {
        throw std::invalid_argument("cap must be >= 1");
    }
    if (target_k < 1 && stop == ImmortalStop::at_most_walks) {
        throw std::invalid_argument("target_k must be >= 1");
    }
    std::vector<Vertex> everyone;
    if (start.empty()) {
        everyone = all_vertices(g);
        start = everyone;
    }
    Ensemble e(g, start, immortal, seed);
    auto done = [&] {
        return stop == ImmortalStop::at_most_walks ? e.size() <= target_k
                                                   : e.mortal_count() <= target_k;
    };
    return run_until(
        seed, cap, record_trajectory, done, [&] { e.step(); }, [&] { return e.size(); });
}

// ---------------------------------------------------------------------------
// Estimation

std::string_view to_string(SimKind k) noexcept {
    switch (k) {
    case SimKind::meeting:
        return "meeting";
    case SimKind::meeting_stationary:
        return "meeting_stationary";
    case SimKind::coalescence:
        return "coalescence";
    case SimKind::voter:
        return "voter";
    case SimKind::immortal:
        return "immortal";
    }
    return "unknown";
}

SimKind sim_kind_from_string(std::string_view s) {
    for (auto k : {SimKind::meeting, SimKind::meeting_stationary, SimKind::coalescence,
                   SimKind::voter, SimKind::immortal}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw std::invalid_argument("unknown simulation kind '" + std::string(s) + "'");
}

SimSample run_trial(const Graph& g, const SimParams& p, std::uint64_t seed, Steps cap) {
    switch (p.kind) {
    case SimKind::meeting:
        return simulate_meeting(g, p.u, p.v, seed, cap);
    case SimKind::meeting_stationary:
        return simulate_meeting_stationary(g, seed, cap);
    case SimKind::coalescence:
        return simulate_coalescence(g, p.start, seed, cap);
    case SimKind::voter:
        return simulate_voter(g, seed, cap, p.lazy_voter);
    case SimKind::immortal:
        return simulate_immortal(g, p.start, p.immortal, p.target_k, seed, cap, p.stop);
    }
    throw std::invalid_argument("unhandled simulation kind");
}

std::vector<SimSample> sample(const Graph& g, const SimParams& params, std::size_t trials,
                              std::uint64_t master_seed, Steps cap) {
    std::vector<SimSample> out(trials);
    parallel_for(trials, [&](std::size_t i) {
        out[i] = run_trial(g, params, rng::trial_seed(master_seed, i), cap);
    });
    return out;
}

double pairwise_sum(std::span<const double> x) noexcept {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) {
            s += v;
        }
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

Estimate summarize(std::span<const SimSample> samples) {
    Estimate e;
    e.trials = samples.size();
    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.censored) {
            ++e.censored_count;
        } else {
            values.push_back(double(s.value));
        }
    }
    e.censored_warning = e.censored_count > 0;
    if (values.empty()) {
        throw AllCensored("all " + std::to_string(samples.size()) + " trials hit the cap");
    }
    const double k = double(values.size());
    e.mean = pairwise_sum(values) / k;
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            sq[i] = (values[i] - e.mean) * (values[i] - e.mean);
        }
        e.stderr_ = std::sqrt(pairwise_sum(sq) / (k - 1.0) / k);
    }
    e.ci95_lo = e.mean - kZ95 * e.stderr_;
    e.ci95_hi = e.mean + kZ95 * e.stderr_;
    return e;
}

Estimate estimate(const Graph& g, const SimParams& params, std::size_t trials,
                  std::uint64_t master_seed, Steps cap) {
    if (trials < 2) {
        throw std::invalid_argument("estimate needs at least 2 trials");
    }
    const auto samples = sample(g, params, trials, master_seed, cap);
    return summarize(samples);
}

} // namespace crw
