#include <cmath>

#include <gtest/gtest.h>

#include "crw/errors.hpp"
#include "crw/graph.hpp"
#include "crw/markov.hpp"
#include "oracle.hpp"

using namespace crw;

namespace {

Graph make(Family f, std::size_t size, std::uint64_t seed = 1) {
    FamilySpec base;
    if (f == Family::torus || f == Family::grid) base.dim = 2;
    if (f == Family::random_regular) base.degree = 3;
    return generate(FamilySpec::sized(f, size, base), seed);
}

Graph star_with_leaves(std::size_t leaves) { return make(Family::star, leaves + 1); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

// ---------------------------------------------------------------------------
// Distributions

TEST(Stationary, DegreeProportionalAndReversible) {
    const Graph g = make(Family::barbell, 16);
    const DistVector pi = stationary(g);
    EXPECT_NEAR(pi.sum(), 1.0, 1e-15);
    const Eigen::MatrixXd p = transition_matrix(g);
    EXPECT_LT((pi.transpose() * p - pi.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    for (Vertex u = 0; u < g.n(); ++u) {
        for (Vertex v = 0; v < g.n(); ++v) {
            EXPECT_NEAR(pi(u) * p(u, v), pi(v) * p(v, u), 1e-16);
        }
    }
}

TEST(Stationary, LazyStepMatchesMatrix) {
    const Graph g = make(Family::binary_tree, 4);
    const Eigen::MatrixXd p = transition_matrix(g);
    EXPECT_LT((p - oracle::lazy_matrix(g)).cwiseAbs().maxCoeff(), 1e-16);
    const DistVector row = tstep_row(g, 3, 7);
    Eigen::RowVectorXd ref = Eigen::RowVectorXd::Zero(Eigen::Index(g.n()));
    ref(3) = 1.0;
    for (int t = 0; t < 7; ++t) ref = ref * p;
    EXPECT_LT((row.transpose() - ref).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_TRUE(is_distribution(row));
}

TEST(Stationary, ReturnProbabilityMonotoneAndAbovePi) {
    for (const Graph& g : {make(Family::cycle, 9), make(Family::star, 7), make(Family::path, 10)}) {
        const DistVector pi = stationary(g);
        for (Vertex u = 0; u < g.n(); ++u) {
            DistVector d = point_mass(g.n(), u);
            double previous = 1.0;
            for (int t = 0; t < 60; ++t) {
                EXPECT_LE(d(u), previous + 1e-15);
                EXPECT_GE(d(u), pi(u) - 1e-15);
                previous = d(u);
                d = lazy_step(g, d);
            }
        }
    }
}

TEST(Stationary, TvDistanceChecksLength) {
    Eigen::VectorXd a = Eigen::VectorXd::Ones(3) / 3.0;
    Eigen::VectorXd b = Eigen::VectorXd::Ones(4) / 4.0;
    EXPECT_THROW(tv_distance(a, b), LengthMismatch);
    EXPECT_DOUBLE_EQ(tv_distance(a, a), 0.0);
}

// ---------------------------------------------------------------------------
// Mixing and separation

TEST(Mixing, SmallCases) {
    EXPECT_EQ(mixing_time(make(Family::clique, 16)).value(), 2u);
    EXPECT_EQ(mixing_time(star_with_leaves(4)).value(), 2u);
    EXPECT_EQ(separation_time(star_with_leaves(4)), 3u);
    EXPECT_EQ(mixing_time(make(Family::clique, 2)).value(), 1u);
    EXPECT_EQ(separation_time(make(Family::clique, 2)), 1u);
    EXPECT_EQ(mixing_time(make(Family::cycle, 16)).value(), 32u);
}

TEST(Mixing, MatchesBruteForcePowers) {
    for (const Graph& g : {make(Family::path, 12), make(Family::barbell, 12), make(Family::grid, 4),
                           make(Family::random_regular, 20, 4)}) {
        const auto t = mixing_time(g);
        EXPECT_TRUE(t.exact());
        EXPECT_EQ(t.value(), oracle::mixing(g, kInvE));
        EXPECT_EQ(mixing_time(g, 0.1).value(), oracle::mixing(g, 0.1));
    }
}

TEST(Mixing, BracketContainsPairwiseValue) {
    MarkovOptions small;
    small.dense_mixing_limit = 4;
    for (const Graph& g : {make(Family::cycle, 24), make(Family::binary_tree, 5)}) {
        const auto exact = mixing_time(g);
        const auto bracket = mixing_time(g, kInvE, small);
        EXPECT_EQ(bracket.method, MixingMethod::bracket);
        EXPECT_LE(bracket.lower, exact.value());
        EXPECT_GE(bracket.upper, exact.value());
        EXPECT_EQ(bracket.lower, mixing_time_stationary(g));
    }
}

TEST(Mixing, SeparationWithinFourMixing) {
    for (const Graph& g : {make(Family::path, 16), make(Family::star, 16), make(Family::hypercube, 4)}) {
        EXPECT_LE(separation_time(g), 4 * mixing_time(g).value());
    }
}

TEST(Mixing, BudgetAndArguments) {
    MarkovOptions tight;
    tight.step_budget = 3;
    EXPECT_THROW(mixing_time(make(Family::path, 30), kInvE, tight), BudgetExceeded);
    EXPECT_THROW(mixing_time(make(Family::path, 5), 1.5), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Spectrum

TEST(Spectral, CycleEight) {
    const auto s = spectral(make(Family::cycle, 8));
    EXPECT_NEAR(s.lambda2, 0.8535533905932737, 1e-12);
    EXPECT_NEAR(s.gap, 1.0 - 0.8535533905932737, 1e-12);
}

TEST(Spectral, IterativeAgreesWithDense) {
    MarkovOptions iterative;
    iterative.dense_spectral_limit = 0;
    for (const Graph& g : {make(Family::barbell, 40), make(Family::random_regular, 60, 9),
                           make(Family::hypercube, 5)}) {
        const auto dense = spectral(g);
        const auto it = spectral(g, iterative);
        EXPECT_EQ(it.method, SpectralMethod::iterative);
        EXPECT_NEAR(dense.lambda2, it.lambda2, 1e-7);
    }
}

// ---------------------------------------------------------------------------
// Hitting times

TEST(Hitting, CliqueIsTwiceNMinusOne) {
    for (std::size_t n : {4u, 8u, 16u, 32u}) {
        const double h = t_hit(make(Family::clique, n));
        EXPECT_LE(rel(h, 2.0 * double(n - 1)), 1e-9) << n;
    }
}

TEST(Hitting, CycleAntipodal) {
    const auto prof = hitting_to(make(Family::cycle, 8), 4);
    EXPECT_NEAR(prof.h(0), 32.0, 1e-9);
    EXPECT_DOUBLE_EQ(prof.h(4), 0.0);
    EXPECT_LT(prof.residual, 1e-9);
}

TEST(Hitting, RoutesAgreeWithOracle) {
    MarkovOptions sparse;
    sparse.dense_hitting_limit = 0;
    for (const Graph& g : {make(Family::barbell, 14), make(Family::star, 9), make(Family::grid, 4),
                           make(Family::binary_tree, 4)}) {
        const Eigen::MatrixXd h = hitting_matrix(g);
        for (Vertex v = 0; v < g.n(); ++v) {
            const Eigen::VectorXd ref = oracle::hitting(g, v);
            EXPECT_LT((hitting_to(g, v).h - ref).cwiseAbs().maxCoeff(), 1e-8 * ref.maxCoeff());
            EXPECT_LT((hitting_to(g, v, sparse).h - ref).cwiseAbs().maxCoeff(),
                      1e-8 * ref.maxCoeff());
            EXPECT_LT((h.col(v) - ref).cwiseAbs().maxCoeff(), 1e-8 * ref.maxCoeff());
        }
    }
}

TEST(Hitting, PerTargetRouteMatchesFundamentalMatrix) {
    MarkovOptions per_target;
    per_target.fundamental_limit = 0;
    const Graph g = make(Family::path, 20);
    EXPECT_NEAR(t_hit(g, per_target), t_hit(g), 1e-8 * t_hit(g));
}

TEST(Hitting, LowerBoundByPiMin) {
    for (const Graph& g : {make(Family::star, 12), make(Family::path, 12), make(Family::cycle, 12)}) {
        const double pi_min = stationary(g).minCoeff();
        EXPECT_GE(t_hit(g), 2.0 / pi_min - 2.0 - 1e-9);
    }
}

// ---------------------------------------------------------------------------
// Meeting times

TEST(Meeting, CycleEight) {
    const auto r = meeting_exact(make(Family::cycle, 8));
    EXPECT_NEAR(r.t_meet, 320.0 / 17.0, 1e-7);
    EXPECT_NEAR(r.t_meet_pi, 13.078431372549026, 1e-7);
    EXPECT_EQ(r.argmax_v - r.argmax_u, 4u);
}

TEST(Meeting, CycleSixteenAndCliqueEight) {
    const auto c16 = meeting_exact(make(Family::cycle, 16));
    EXPECT_NEAR(c16.t_meet, 69.65684575389953, 1e-6);
    EXPECT_NEAR(c16.t_meet_pi, 47.90685424949874, 1e-6);
    const auto k8 = meeting_exact(make(Family::clique, 8));
    EXPECT_NEAR(k8.t_meet, 9.8, 1e-8);
    EXPECT_NEAR(k8.t_meet_pi, 8.575, 1e-8);
    EXPECT_NEAR(meeting_exact(make(Family::clique, 2)).t_meet, 2.0, 1e-9);
}

TEST(Meeting, SolversAgreeWithProductChain) {
    MeetingOptions jacobi;
    jacobi.solver = MeetingSolver::jacobi;
    jacobi.tolerance = 1e-10;
    for (const Graph& g : {make(Family::star, 6), make(Family::path, 7), make(Family::binary_tree, 3),
                           make(Family::barbell, 8)}) {
        const Eigen::MatrixXd ref = oracle::meeting(g);
        const auto cg = meeting_exact(g);
        const auto jc = meeting_exact(g, {}, jacobi);
        EXPECT_LT((cg.times - ref).cwiseAbs().maxCoeff(), 1e-7 * ref.maxCoeff());
        EXPECT_LT((jc.times - ref).cwiseAbs().maxCoeff(), 1e-7 * ref.maxCoeff());
        EXPECT_LE(cg.residual, 1e-8);
    }
}

TEST(Meeting, SizeLimit) {
    EXPECT_THROW(meeting_exact(make(Family::cycle, 101)), TooLarge);
    MarkovOptions small;
    small.meeting_limit = 10;
    EXPECT_THROW(meeting_exact(make(Family::cycle, 11), small), TooLarge);
}

// ---------------------------------------------------------------------------
// Collision statistics

TEST(Collision, CliqueSixteen) {
    const auto cs = collision_stats(make(Family::clique, 16));
    EXPECT_EQ(cs.t_mix_used, 2u);
    EXPECT_NEAR(cs.c_max, 19.0 / 15.0, 1e-14);
    EXPECT_NEAR(cs.c_min, 19.0 / 15.0, 1e-14);
    EXPECT_NEAR(cs.r_max, 1.5, 1e-14);
    EXPECT_NEAR(cs.pi_norm_sq, 1.0 / 16.0, 1e-15);
}

TEST(Collision, CycleSixteen) {
    const auto cs = collision_stats(make(Family::cycle, 16));
    EXPECT_EQ(cs.t_mix_used, 32u);
    EXPECT_NEAR(cs.c_max, 3150720421032887596542139225887235.0 / 649037107316853453566312041152512.0,
                1e-12);
    EXPECT_NEAR(cs.r_max, 114541451303282191.0 / 18014398509481984.0, 1e-12);
}
