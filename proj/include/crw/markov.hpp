#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

#include "crw/errors.hpp"
#include "crw/graph.hpp"

namespace crw {

/// Probability distribution over the vertices of a graph (a row of P^t, or pi).
using DistVector = Eigen::VectorXd;

inline constexpr double kInvE = 0.36787944117144233; // 1/e

struct MarkovOptions {
    /// Largest n for which mixing time uses the exact pairwise distance.
    std::size_t dense_mixing_limit = 256;
    /// Largest n solved by the dense eigensolver in spectral().
    std::size_t dense_spectral_limit = 2048;
    /// Largest n solved by dense LU in hitting_to().
    std::size_t dense_hitting_limit = 512;
    /// Largest n for which t_hit() inverts the fundamental matrix.
    std::size_t fundamental_limit = 2048;
    /// Largest n accepted by meeting_exact() (state space is n^2 - n).
    std::size_t meeting_limit = 100;
    /// Walk steps any row-evolution routine may take before giving up.
    std::size_t step_budget = 2'000'000;
};

// ---------------------------------------------------------------------------
// Distributions and single steps

DistVector stationary(const Graph& g);
DistVector point_mass(std::size_t n, Vertex u);

/// One step of the lazy walk applied to a row distribution: d' = d P with
/// p(u,u) = 1/2 and p(u,v) = 1/(2 deg u) on edges.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
lazy_step(const Graph& g, const Eigen::MatrixBase<Derived>& d) {
    using Scalar = typename Derived::Scalar;
    const auto n = static_cast<Eigen::Index>(g.n());
    if (d.size() != n) {
        throw LengthMismatch("distribution has " + std::to_string(d.size()) +
                             " entries, graph has " + std::to_string(n));
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
    for (Vertex v = 0; v < g.n(); ++v) {
        if (g.degree(v) == 0) { // single-vertex graph: the walk cannot move
            out(v) = d(v);
            continue;
        }
        Scalar acc = d(v) / Scalar(2);
        for (Vertex u : g.neighbors(v)) {
            acc += d(u) / Scalar(2 * g.degree(u));
        }
        out(v) = acc;
    }
    return out;
}

/// p^t_{u,.}: t lazy steps from the point mass at u.
DistVector tstep_row(const Graph& g, Vertex u, std::size_t t);

template <class A, class B>
double tv_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    if (a.size() != b.size()) {
        throw LengthMismatch(std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    return 0.5 * (a - b).template lpNorm<1>();
}

/// Entries non-negative and summing to one within `tol`.
bool is_distribution(const DistVector& d, double tol = 1e-12);

/// Dense lazy transition matrix.
Eigen::MatrixXd transition_matrix(const Graph& g);

/// In-place R <- R P for a dense matrix whose rows are distributions.
void lazy_step_rows(const Graph& g, Eigen::MatrixXd& rows);

// ---------------------------------------------------------------------------
// Mixing and separation

enum class MixingMethod { pairwise, bracket };

/// t_mix(eps). With method == pairwise, lower == upper is the exact first t
/// with max_{u,v} TV(p_u^t, p_v^t) <= eps. With method == bracket (large n),
/// the pairwise value is only known to lie in [lower, upper], where lower is
/// the first t with d(t) = max_u TV(p_u^t, pi) <= eps and upper the first t
/// with d(t) <= eps/2.
struct MixingTime {
    std::size_t lower = 0;
    std::size_t upper = 0;
    MixingMethod method = MixingMethod::pairwise;
    double eps = kInvE;

    bool exact() const noexcept { return method == MixingMethod::pairwise; }
    /// Upper end of the bracket; the exact value when exact().
    std::size_t value() const noexcept { return upper; }
};

std::string_view to_string(MixingMethod m) noexcept;

MixingTime mixing_time(const Graph& g, double eps = kInvE, const MarkovOptions& opt = {});

/// First t with s(t) = max_{u,v} (1 - p^t_{u,v} / pi(v)) <= eps.
std::size_t separation_time(const Graph& g, double eps = kInvE, const MarkovOptions& opt = {});

/// First t with d(t) = max_u TV(p_u^t, pi) <= eps.
std::size_t mixing_time_stationary(const Graph& g, double eps = kInvE,
                                   const MarkovOptions& opt = {});

/// max_{u,v} TV between rows of a row-distribution matrix.
double max_pairwise_tv(const Eigen::MatrixXd& rows);
/// max_u TV(row u, pi).
double max_tv_to(const Eigen::MatrixXd& rows, const DistVector& pi);
/// max_{u,v} (1 - rows(u,v) / pi(v)), clamped below at 0.
double separation_distance(const Eigen::MatrixXd& rows, const DistVector& pi);

// ---------------------------------------------------------------------------
// Spectrum

enum class SpectralMethod { dense, iterative };

struct SpectralSummary {
    double lambda2 = 0.0;
    double gap = 1.0;
    SpectralMethod method = SpectralMethod::dense;
    double residual = 0.0;
};

std::string_view to_string(SpectralMethod m) noexcept;

/// Second largest eigenvalue of the lazy transition matrix, computed on the
/// symmetric similarity transform D^{1/2} P D^{-1/2}.
SpectralSummary spectral(const Graph& g, const MarkovOptions& opt = {});

// ---------------------------------------------------------------------------
// Hitting times

struct HittingProfile {
    Vertex target = 0;
    /// h[u] = t_hit(u, target).
    Eigen::VectorXd h;
    /// max_u |h(u) - 1 - sum_w p(u,w) h(w)| over u != target.
    double residual = 0.0;
};

HittingProfile hitting_to(const Graph& g, Vertex target, const MarkovOptions& opt = {});

/// Full matrix H(u,v) = t_hit(u,v) from the fundamental matrix
/// Z = (I - P + 1 pi^T)^{-1}: H(u,v) = (Z(v,v) - Z(u,v)) / pi(v).
Eigen::MatrixXd hitting_matrix(const Graph& g);

/// max_{u,v} t_hit(u,v).
double t_hit(const Graph& g, const MarkovOptions& opt = {});

// ---------------------------------------------------------------------------
// Meeting times on the product chain

enum class MeetingSolver {
    /// Conjugate gradient on the pi x pi symmetrised product-chain operator.
    conjugate_gradient,
    /// Fixed-point sweeps M <- 1 + Q M.
    jacobi,
};

struct MeetingOptions {
    MeetingSolver solver = MeetingSolver::conjugate_gradient;
    double tolerance = 1e-8;
    std::size_t max_iterations = 1'000'000;
};

struct MeetingResult {
    /// max_{u,v} t_meet(u,v).
    double t_meet = 0.0;
    /// Expected meeting time from two independent stationary starts.
    double t_meet_pi = 0.0;
    Vertex argmax_u = 0;
    Vertex argmax_v = 0;
    /// M(u,v) = t_meet(u,v); zero diagonal.
    Eigen::MatrixXd times;
    /// max |M - 1 - Q M| over off-diagonal pairs.
    double residual = 0.0;
    std::size_t iterations = 0;
};

MeetingResult meeting_exact(const Graph& g, const MarkovOptions& opt = {},
                            const MeetingOptions& mopt = {});

// ---------------------------------------------------------------------------
// Collision statistics over a mixing window

struct CollisionStats {
    double c_max = 0.0;
    double c_min = 0.0;
    double r_max = 0.0;
    double pi_norm_sq = 0.0;
    std::size_t t_mix_used = 0;
    MixingMethod t_mix_method = MixingMethod::pairwise;
};

/// Sums over t in [0, t_mix - 1] of sum_v (p^t_{u,v})^2 (max and min over u)
/// and of p^t_{u,u} (max over u), using t_mix(1/e).
CollisionStats collision_stats(const Graph& g, const MarkovOptions& opt = {});

/// Same sums over an explicit window length.
CollisionStats collision_stats(const Graph& g, std::size_t window);

// ---------------------------------------------------------------------------
// Expander block of the lower-bound construction

struct ExpanderSpectrum {
    std::size_t degree = 0;
    /// Largest adjacency eigenvalue magnitude other than +-degree.
    double lambda = 0.0;
    /// 2 sqrt(degree - 1); a Ramanujan graph has lambda at or below it.
    double ramanujan_bound = 0.0;
};

/// Spectrum of the bipartite expander induced on the layout's expander vertices.
ExpanderSpectrum expander_spectrum(const Graph& g, const LowerBoundLayout& layout);

} // namespace crw
