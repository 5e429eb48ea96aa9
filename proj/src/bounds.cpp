#include "crw/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "crw/parallel.hpp"
#include "crw/rng.hpp"

namespace crw {

namespace {

constexpr double kE = 2.718281828459045;

std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

BoundCheck explicit_le(std::string name, double lhs, double rhs, std::string note = {}) {
    BoundCheck c{std::move(name), lhs, Relation::le, rhs, true, holds_le(lhs, rhs), std::move(note)};
    return c;
}

BoundCheck explicit_ge(std::string name, double lhs, double rhs, std::string note = {}) {
    BoundCheck c{std::move(name), lhs, Relation::ge, rhs, true, holds_le(rhs, lhs), std::move(note)};
    return c;
}

BoundCheck ratio_entry(std::string name, double measured, double expression, std::string note = {}) {
    return {std::move(name), measured, Relation::ratio, expression, false, std::nullopt,
            std::move(note)};
}

// Per-start statistics of an additive functional along sampled walks.
struct StartStats {
    double mean = 0.0;
    std::array<std::size_t, 3> exceed{};
};

template <class Weight>
StartStats sample_functional(const Graph& g, Vertex start, std::size_t horizon,
                             std::size_t trials, std::uint64_t seed,
                             const std::array<double, 3>& thresholds, Weight weight) {
    StartStats st;
    std::vector<double> sums(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        const std::uint64_t ws = rng::trial_seed(seed, std::uint64_t(start) * trials + i);
        Vertex x = start;
        double sum = 0.0;
        for (std::size_t t = 0; t < horizon; ++t) {
            sum += weight(t, x);
            x = lazy_move(g, x, rng::keyed(ws, t));
        }
        sums[i] = sum;
        for (std::size_t k = 0; k < 3; ++k) {
            if (sum >= thresholds[k]) {
                ++st.exceed[k];
            }
        }
    }
    st.mean = pairwise_sum(sums) / double(trials);
    return st;
}

void fill_tails(ConcentrationReport& rep, const std::array<double, 3>& thresholds,
                const std::vector<StartStats>& stats) {
    for (std::size_t k = 0; k < 3; ++k) {
        TailCheck& tc = rep.tails[k];
        tc.lambda = int(k) + 1;
        tc.threshold = thresholds[k];
        tc.passed = true;
        for (const auto& st : stats) {
            const double p = double(st.exceed[k]) / double(rep.trials);
            const double se = std::sqrt(p * (1.0 - p) / double(rep.trials));
            const double allowance = std::ldexp(1.0, -tc.lambda) + 3.0 * se;
            if (p >= tc.frequency) {
                tc.frequency = p;
                tc.stderr_ = se;
                tc.allowance = allowance;
            }
            tc.passed = tc.passed && p <= allowance;
        }
    }
}

} // namespace

std::string_view to_string(Relation r) noexcept {
    switch (r) {
    case Relation::le:
        return "<=";
    case Relation::ge:
        return ">=";
    case Relation::ratio:
        return "ratio";
    }
    return "?";
}

bool holds_le(double lhs, double rhs) noexcept {
    return lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs));
}

MeasuredQuantities MeasuredQuantities::for_graph(const Graph& g, bool vertex_transitive) {
    MeasuredQuantities mq;
    mq.n = g.n();
    mq.gamma = g.gamma();
    mq.vertex_transitive = vertex_transitive;
    const DistVector pi = stationary(g);
    mq.pi_min = pi.minCoeff();
    mq.pi_norm_sq = pi.squaredNorm();
    return mq;
}

// ---------------------------------------------------------------------------

double bound_coal_mixtradeoff(double t_meet, double t_mix, double n) {
    if (!(t_meet > 0.0) || !(t_mix >= 0.0) || !(n > 0.0)) {
        throw std::invalid_argument("bound_coal_mixtradeoff: inputs must be positive");
    }
    return t_meet * (1.0 + std::sqrt(t_mix / t_meet) * std::log(n));
}

std::pair<double, double> bound_meet_interval(const CollisionStats& cs) {
    return {cs.c_min / (64.0 * cs.pi_norm_sq), 5.0 * kE * kE * cs.c_max / cs.pi_norm_sq};
}

double bound_meet_hit(double t_hit) { return 4.0 * t_hit; }

double bound_hit_spectral(double n, double gamma, double lambda2) {
    if (!(lambda2 >= 0.0 && lambda2 < 1.0)) {
        throw std::invalid_argument("bound_hit_spectral: lambda2 must lie in [0, 1)");
    }
    return gamma * n / std::sqrt(1.0 - lambda2);
}

double bound_coal_beer(double t_meet, double k) {
    if (!(k >= 2.0)) {
        throw std::invalid_argument("bound_coal_beer: k must be >= 2");
    }
    return t_meet * std::log(k);
}

SandwichCheck sandwich_avgmeet(double t_mix, double t_meet_pi, double t_meet) {
    SandwichCheck s;
    s.lower = std::max(t_mix / kE, t_meet_pi);
    s.value = t_meet;
    const double c = 2.0 / ((1.0 - 1.0 / kE) * (1.0 - 1.0 / kE));
    s.upper = c * (4.0 * t_mix + 2.0 * t_meet_pi);
    s.lower_ok = holds_le(s.lower, t_meet);
    s.upper_ok = holds_le(t_meet, s.upper);
    return s;
}

// ---------------------------------------------------------------------------

bool ConcentrationReport::passed() const noexcept {
    return mean_passed && std::all_of(tails.begin(), tails.end(),
                                      [](const TailCheck& t) { return t.passed; });
}

ConcentrationReport check_concentration(const Graph& g, std::span<const double> f,
                                        std::size_t horizon, std::size_t trials,
                                        std::uint64_t seed, double t_hit_value) {
    if (f.size() != g.n()) {
        throw LengthMismatch("f has " + std::to_string(f.size()) + " entries, graph has " +
                             std::to_string(g.n()));
    }
    if (trials < 2) {
        throw std::invalid_argument("check_concentration needs at least 2 trials");
    }
    for (double x : f) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::invalid_argument("f must take values in [0, 1]");
        }
    }
    const DistVector pi = stationary(g);
    ConcentrationReport rep;
    rep.horizon = horizon;
    rep.trials = trials;
    rep.f_bar = Eigen::Map<const Eigen::VectorXd>(f.data(), Eigen::Index(f.size())).dot(pi);
    rep.t_plus = std::max(t_hit_value, double(horizon));
    rep.mean_bound = 8.0 * rep.t_plus * rep.f_bar;

    std::array<double, 3> thresholds{};
    for (int k = 0; k < 3; ++k) {
        thresholds[k] = double(k + 1) * (16.0 * rep.t_plus * rep.f_bar + 1.0);
    }
    std::vector<StartStats> stats(g.n());
    parallel_for(g.n(), [&](std::size_t u) {
        stats[u] = sample_functional(g, Vertex(u), horizon, trials, seed, thresholds,
                                     [&](std::size_t, Vertex x) { return f[x]; });
    });
    for (Vertex u = 0; u < g.n(); ++u) {
        if (u == 0 || stats[u].mean > rep.worst_mean) {
            rep.worst_mean = stats[u].mean;
            rep.worst_start = u;
        }
    }
    rep.mean_passed = holds_le(rep.worst_mean, rep.mean_bound);
    fill_tails(rep, thresholds, stats);
    return rep;
}

ConcentrationReport check_concentration(const Graph& g, std::span<const Vertex> target_set,
                                        std::size_t horizon, std::size_t trials,
                                        std::uint64_t seed) {
    std::vector<double> f(g.n(), 0.0);
    for (Vertex v : target_set) {
        if (v >= g.n()) {
            throw std::out_of_range("target vertex out of range");
        }
        f[v] = 1.0;
    }
    return check_concentration(g, f, horizon, trials, seed, t_hit(g));
}

ConcentrationReport check_collision_concentration(const Graph& g, std::span<const Vertex> set,
                                                  Vertex start, std::size_t horizon,
                                                  std::size_t trials, std::uint64_t seed,
                                                  double t_hit_value) {
    if (set.empty() || trials < 2) {
        throw std::invalid_argument("collision concentration needs a set and >= 2 trials");
    }
    std::vector<std::uint8_t> in_set(g.n(), 0);
    std::uint32_t dmin = ~0u;
    std::uint32_t dmax = 0;
    for (Vertex v : set) {
        in_set.at(v) = 1;
        dmin = std::min(dmin, g.degree(v));
        dmax = std::max(dmax, g.degree(v));
    }
    if (!in_set.at(start)) {
        throw std::invalid_argument("start vertex must belong to the set");
    }
    const DistVector pi = stationary(g);
    double pi_max_s = 0.0;
    for (Vertex v : set) {
        pi_max_s = std::max(pi_max_s, pi(v));
    }
    const double gamma_s = double(dmax) / double(std::max(dmin, 1u));

    // rows(t, v) = p^t_{start, v}
    Eigen::MatrixXd rows(Eigen::Index(std::max<std::size_t>(horizon, 1)), Eigen::Index(g.n()));
    DistVector d = point_mass(g.n(), start);
    for (std::size_t t = 0; t < horizon; ++t) {
        rows.row(Eigen::Index(t)) = d.transpose();
        d = lazy_step(g, d);
    }

    ConcentrationReport rep;
    rep.horizon = horizon;
    rep.trials = trials;
    rep.f_bar = pi_max_s;
    rep.t_plus = std::max(t_hit_value, double(horizon));
    rep.mean_bound = 16.0 * gamma_s * rep.t_plus * pi_max_s;
    std::array<double, 3> thresholds{};
    for (int k = 0; k < 3; ++k) {
        thresholds[k] = double(k + 1) * (2.0 * rep.mean_bound + 1.0);
    }
    const auto st = sample_functional(g, start, horizon, trials, seed, thresholds,
                                      [&](std::size_t t, Vertex x) {
                                          return in_set[x] ? rows(Eigen::Index(t), x) : 0.0;
                                      });
    rep.worst_mean = st.mean;
    rep.worst_start = start;
    rep.mean_passed = holds_le(st.mean, rep.mean_bound);
    fill_tails(rep, thresholds, {st});
    return rep;
}

// ---------------------------------------------------------------------------

bool BoundReport::all_explicit_passed() const noexcept { return explicit_failures() == 0; }

std::size_t BoundReport::explicit_failures() const noexcept {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) {
        return e.explicit_constants && e.passed.has_value() && !*e.passed;
    }));
}

const BoundCheck* BoundReport::find(std::string_view name) const noexcept {
    for (const auto& e : entries) {
        if (e.name == name) {
            return &e;
        }
    }
    return nullptr;
}

std::string BoundReport::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json j;
        j["name"] = e.name;
        j["lhs"] = e.lhs;
        j["relation"] = std::string(to_string(e.relation));
        j["rhs"] = e.rhs;
        j["explicit"] = e.explicit_constants;
        if (e.passed) {
            j["passed"] = *e.passed;
        } else {
            j["passed"] = nullptr;
        }
        if (e.relation == Relation::ratio) {
            j["ratio"] = e.ratio();
        }
        if (!e.note.empty()) {
            j["note"] = e.note;
        }
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::string BoundReport::to_csv() const {
    std::ostringstream out;
    out << "name,lhs,rel,rhs,explicit,passed\n";
    for (const auto& e : entries) {
        out << e.name << ',' << fmt_double(e.lhs) << ',' << to_string(e.relation) << ','
            << fmt_double(e.rhs) << ',' << (e.explicit_constants ? "true" : "false") << ','
            << (e.passed ? (*e.passed ? "true" : "false") : "na") << '\n';
    }
    return out.str();
}

BoundReport verify_relations(const MeasuredQuantities& mq, const VerifyOptions& opt) {
    if (opt.require_exact) {
        std::vector<std::string> missing;
        if (!mq.t_hit) missing.emplace_back("t_hit");
        if (!mq.t_meet) missing.emplace_back("t_meet");
        if (!mq.t_meet_pi) missing.emplace_back("t_meet_pi");
        if (!mq.t_mix) missing.emplace_back("t_mix");
        if (!mq.t_sep) missing.emplace_back("t_sep");
        if (!mq.pi_min) missing.emplace_back("pi_min");
        if (!mq.collision) missing.emplace_back("collision");
        if (!missing.empty()) {
            std::string what;
            for (const auto& m : missing) {
                what += (what.empty() ? "" : ", ") + m;
            }
            throw MissingQuantity(what);
        }
    }

    BoundReport rep;
    auto& out = rep.entries;
    const double n = double(mq.n);
    // With only a bracket known, each check takes the endpoint that cannot
    // produce a false failure and says so in its note.
    const bool have_mix = mq.t_mix.has_value();
    const double mix_lo = have_mix ? double(mq.t_mix->lower) : 0.0;
    const double mix_hi = have_mix ? double(mq.t_mix->upper) : 0.0;
    const std::string mix_note =
        mq.t_mix ? "t_mix " + std::string(to_string(mq.t_mix->method)) : std::string{};

    if (mq.t_hit && mq.pi_min) {
        out.push_back(explicit_ge("hit_ge_2_over_pimin_minus_2", *mq.t_hit, 2.0 / *mq.pi_min - 2.0));
    }
    if (mq.t_sep && have_mix) {
        out.push_back(explicit_le("sep_le_4_mix", *mq.t_sep, 4.0 * mix_hi, mix_note));
    }
    if (mq.t_meet && mq.t_hit) {
        out.push_back(explicit_le("meet_le_4_hit", *mq.t_meet, bound_meet_hit(*mq.t_hit)));
    }
    if (mq.t_meet && mq.t_meet_pi && have_mix) {
        const auto lo = sandwich_avgmeet(mix_lo, *mq.t_meet_pi, *mq.t_meet);
        const auto hi = sandwich_avgmeet(mix_hi, *mq.t_meet_pi, *mq.t_meet);
        out.push_back(explicit_ge("meet_ge_max_mix_over_e_meetpi", lo.value, lo.lower, mix_note));
        out.push_back(explicit_le("meet_le_avgmeet_upper", hi.value, hi.upper, mix_note));
    }
    if (mq.collision) {
        const auto [lo, hi] = bound_meet_interval(*mq.collision);
        const std::string note = "collision window t_mix " +
                                 std::string(to_string(mq.collision->t_mix_method)) + " = " +
                                 std::to_string(mq.collision->t_mix_used);
        if (mq.t_meet_pi) {
            out.push_back(explicit_ge("meetpi_ge_cmin_bound", *mq.t_meet_pi, lo, note));
        }
        if (mq.t_meet) {
            out.push_back(explicit_le("meet_le_cmax_bound", *mq.t_meet, hi, note));
        }
    }
    if (mq.t_meet && mq.t_hit) {
        BoundCheck lo = explicit_ge("vt_meet_ge_half_hit", *mq.t_meet, 0.5 * *mq.t_hit);
        BoundCheck hi = explicit_le("vt_meet_le_2_hit", *mq.t_meet, 2.0 * *mq.t_hit);
        if (!mq.vertex_transitive) {
            lo.passed.reset();
            hi.passed.reset();
            lo.note = hi.note = "not applicable: graph not declared vertex-transitive";
        }
        out.push_back(std::move(lo));
        out.push_back(std::move(hi));
    }

    // Asymptotic expressions: ratios only.
    if (mq.t_hit && mq.lambda2 && *mq.lambda2 < 1.0) {
        out.push_back(ratio_entry("hit_over_spectral_bound", *mq.t_hit,
                                  bound_hit_spectral(n, mq.gamma, *mq.lambda2)));
    }
    if (mq.t_coal_estimate && mq.t_meet && n >= 2.0) {
        const double t_coal = mq.t_coal_estimate->mean;
        out.push_back(ratio_entry("coal_over_meet_log_n", t_coal, bound_coal_beer(*mq.t_meet, n)));
        if (have_mix && *mq.t_meet > 0.0) {
            out.push_back(ratio_entry("coal_over_mixtradeoff", t_coal,
                                      bound_coal_mixtradeoff(*mq.t_meet, mix_hi, n)));
        }
    }
    if (mq.t_coal_estimate && n >= 2.0) {
        out.push_back(ratio_entry("coal_over_log2_n", mq.t_coal_estimate->mean, std::log2(n)));
        out.push_back(ratio_entry("coal_over_n_cubed", mq.t_coal_estimate->mean, n * n * n));
    }
    return rep;
}

} // namespace crw
