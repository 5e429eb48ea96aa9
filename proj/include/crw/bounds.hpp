#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crw/graph.hpp"
#include "crw/markov.hpp"
#include "crw/simulate.hpp"

namespace crw {

/// Everything the relation checks consume. Absent fields skip the checks
/// that need them (or raise MissingQuantity when completeness is required).
struct MeasuredQuantities {
    std::size_t n = 0;
    double gamma = 1.0;
    bool vertex_transitive = false;

    std::optional<double> t_hit;
    std::optional<double> t_meet;
    std::optional<double> t_meet_pi;
    std::optional<MixingTime> t_mix;
    std::optional<double> t_sep;
    std::optional<double> lambda2;
    std::optional<double> pi_norm_sq;
    std::optional<double> pi_min;
    std::optional<CollisionStats> collision;
    std::optional<Estimate> t_coal_estimate;

    /// Graph-derived fields (n, gamma, pi_min, pi_norm_sq) filled from g.
    static MeasuredQuantities for_graph(const Graph& g, bool vertex_transitive);
};

enum class Relation { le, ge, ratio };

std::string_view to_string(Relation r) noexcept;

struct BoundCheck {
    std::string name;
    double lhs = 0.0;
    Relation relation = Relation::le;
    double rhs = 0.0;
    /// true: a theorem with explicit constants, hard pass/fail.
    /// false: an asymptotic expression reported as the ratio lhs / rhs.
    bool explicit_constants = true;
    /// Empty for asymptotic entries and for checks that do not apply.
    std::optional<bool> passed;
    std::string note;

    double ratio() const noexcept { return rhs == 0.0 ? 0.0 : lhs / rhs; }
};

struct BoundReport {
    std::vector<BoundCheck> entries;

    bool all_explicit_passed() const noexcept;
    std::size_t explicit_failures() const noexcept;
    const BoundCheck* find(std::string_view name) const noexcept;

    /// JSON array of entry objects.
    std::string to_json() const;
    /// Header "name,lhs,rel,rhs,explicit,passed" then one row per entry;
    /// passed is true, false or na.
    std::string to_csv() const;
};

/// lhs <= rhs with a relative slack of 1e-9 for floating-point noise.
bool holds_le(double lhs, double rhs) noexcept;

// ---------------------------------------------------------------------------
// Bound expressions

/// t_meet (1 + sqrt(t_mix / t_meet) ln n), implicit constant 1 (asymptotic).
double bound_coal_mixtradeoff(double t_meet, double t_mix, double n);

/// {C_min / (64 |pi|^2), 5 e^2 C_max / |pi|^2}: lower bound on t_meet^pi and
/// upper bound on every t_meet(u,v).
std::pair<double, double> bound_meet_interval(const CollisionStats& cs);

/// 4 t_hit, an upper bound on t_meet.
double bound_meet_hit(double t_hit);

/// Gamma n / sqrt(1 - lambda_2) (asymptotic bound on t_hit).
double bound_hit_spectral(double n, double gamma, double lambda2);

/// t_meet ln k (asymptotic bound on t_coal from k walks).
double bound_coal_beer(double t_meet, double k);

struct SandwichCheck {
    double lower = 0.0;
    double value = 0.0;
    double upper = 0.0;
    bool lower_ok = false;
    bool upper_ok = false;
    bool passed() const noexcept { return lower_ok && upper_ok; }
};

/// max{t_mix / e, t_meet^pi} <= t_meet <= 2 / (1 - 1/e)^2 (4 t_mix + 2 t_meet^pi).
SandwichCheck sandwich_avgmeet(double t_mix, double t_meet_pi, double t_meet);

// ---------------------------------------------------------------------------
// Concentration of additive functionals

struct TailCheck {
    int lambda = 0;
    double threshold = 0.0;
    /// Worst empirical frequency of sum >= threshold over start vertices.
    double frequency = 0.0;
    double stderr_ = 0.0;
    double allowance = 0.0; // 2^-lambda + 3 stderr
    bool passed = false;
};

struct ConcentrationReport {
    double f_bar = 0.0;
    double t_plus = 0.0;
    std::size_t horizon = 0;
    std::size_t trials = 0;
    /// Mean-bound scale: 8 T+ f_bar, or Upsilon in collision mode.
    double mean_bound = 0.0;
    /// Largest empirical mean over start vertices.
    double worst_mean = 0.0;
    Vertex worst_start = 0;
    bool mean_passed = false;
    std::array<TailCheck, 3> tails{};

    bool passed() const noexcept;
};

/// Walks of `horizon` steps from every vertex, `trials` per start, summing
/// f(X_t) for t in [0, horizon). Checks E[sum] <= 8 T+ f_bar and
/// P[sum >= lambda (16 T+ f_bar + 1)] <= 2^-lambda (+ 3 stderr) for
/// lambda = 1, 2, 3, with T+ = max(t_hit, horizon). `f` must lie in [0, 1].
ConcentrationReport check_concentration(const Graph& g, std::span<const double> f,
                                        std::size_t horizon, std::size_t trials,
                                        std::uint64_t seed, double t_hit);

/// Indicator of `target_set`; t_hit computed exactly.
ConcentrationReport check_concentration(const Graph& g, std::span<const Vertex> target_set,
                                        std::size_t horizon, std::size_t trials,
                                        std::uint64_t seed);

/// Collision functional Z = sum_t 1{X_t in S} p^t_{u,X_t} for a walk from
/// `start` in S, with p^t from exact rows. Checks E[Z] <= Upsilon =
/// 16 gamma_S T+ max_{w in S} pi(w) and P[Z >= lambda (2 Upsilon + 1)] <= 2^-lambda.
ConcentrationReport check_collision_concentration(const Graph& g, std::span<const Vertex> set,
                                                  Vertex start, std::size_t horizon,
                                                  std::size_t trials, std::uint64_t seed,
                                                  double t_hit);

// ---------------------------------------------------------------------------

struct VerifyOptions {
    /// Throw MissingQuantity unless every exact quantity is present.
    bool require_exact = true;
};

/// Hard-checks every explicit-constant relation whose inputs are present and
/// reports asymptotic expressions as ratios.
BoundReport verify_relations(const MeasuredQuantities& mq, const VerifyOptions& opt = {});

} // namespace crw
