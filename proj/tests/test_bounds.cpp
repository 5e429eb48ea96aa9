#include <cmath>

#include <gtest/gtest.h>

#include "crw/bounds.hpp"
#include "crw/errors.hpp"

using namespace crw;

namespace {

constexpr double kE2 = 7.38905609893065; // e^2

Graph make(Family f, std::size_t size) { return generate(FamilySpec::sized(f, size)); }

MeasuredQuantities exact(const Graph& g, bool vt) {
    auto mq = MeasuredQuantities::for_graph(g, vt);
    const auto mr = meeting_exact(g);
    mq.t_hit = t_hit(g);
    mq.t_meet = mr.t_meet;
    mq.t_meet_pi = mr.t_meet_pi;
    mq.t_mix = mixing_time(g);
    mq.t_sep = double(separation_time(g));
    mq.lambda2 = spectral(g).lambda2;
    mq.collision = collision_stats(g);
    return mq;
}

} // namespace

TEST(Expressions, Values) {
    EXPECT_DOUBLE_EQ(bound_meet_hit(7.0), 28.0);
    EXPECT_DOUBLE_EQ(bound_coal_beer(10.0, std::exp(2.0)), 20.0);
    EXPECT_DOUBLE_EQ(bound_hit_spectral(16.0, 2.0, 0.75), 64.0);
    EXPECT_DOUBLE_EQ(bound_coal_mixtradeoff(100.0, 25.0, std::exp(1.0)), 150.0);
    EXPECT_THROW(bound_hit_spectral(4.0, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(bound_coal_beer(1.0, 1.0), std::invalid_argument);
}

TEST(Expressions, CollisionIntervalOnClique) {
    const auto cs = collision_stats(make(Family::clique, 16));
    const auto [lo, hi] = bound_meet_interval(cs);
    EXPECT_NEAR(lo, (19.0 / 15.0) / (64.0 / 16.0), 1e-14);
    EXPECT_NEAR(hi, 5.0 * kE2 * (19.0 / 15.0) * 16.0, 1e-9);
}

TEST(Expressions, SandwichOnCycleEight) {
    const auto s = sandwich_avgmeet(8.0, 13.078431372549026, 320.0 / 17.0);
    EXPECT_TRUE(s.passed());
    EXPECT_NEAR(s.lower, 13.078431372549026, 1e-12);
    const double c = 2.0 / std::pow(1.0 - std::exp(-1.0), 2);
    EXPECT_NEAR(s.upper, c * (32.0 + 2.0 * 13.078431372549026), 1e-9);
    EXPECT_FALSE(sandwich_avgmeet(8.0, 13.0, 12.0).lower_ok);
}

TEST(HoldsLe, RelativeSlack) {
    EXPECT_TRUE(holds_le(1.0, 1.0));
    EXPECT_TRUE(holds_le(1e6 + 1e-4, 1e6));
    EXPECT_FALSE(holds_le(1.001, 1.0));
}

TEST(Verify, ExactQuantitiesPassOnSmallGraphs) {
    for (const auto& [g, vt] : {std::pair{make(Family::cycle, 8), true},
                                std::pair{make(Family::star, 9), false},
                                std::pair{make(Family::barbell, 12), false}}) {
        const auto report = verify_relations(exact(g, vt));
        EXPECT_TRUE(report.all_explicit_passed()) << report.to_csv();
        const auto* vt_entry = report.find("vt_meet_le_2_hit");
        ASSERT_NE(vt_entry, nullptr);
        EXPECT_EQ(vt_entry->passed.has_value(), vt);
        EXPECT_NE(report.find("hit_over_spectral_bound"), nullptr);
    }
}

TEST(Verify, MissingQuantities) {
    const Graph g = make(Family::cycle, 6);
    auto mq = MeasuredQuantities::for_graph(g, true);
    mq.t_hit = t_hit(g);
    EXPECT_THROW(verify_relations(mq), MissingQuantity);
    const auto partial = verify_relations(mq, {.require_exact = false});
    ASSERT_EQ(partial.entries.size(), 1u);
    EXPECT_EQ(partial.entries[0].name, "hit_ge_2_over_pimin_minus_2");
}

TEST(Verify, ViolationIsReported) {
    MeasuredQuantities mq;
    mq.n = 4;
    mq.t_hit = 1.0;
    mq.t_meet = 5.0;
    const auto report = verify_relations(mq, {.require_exact = false});
    EXPECT_EQ(report.explicit_failures(), 1u);
    EXPECT_FALSE(report.all_explicit_passed());
    const std::string csv = report.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,lhs,rel,rhs,explicit,passed");
    EXPECT_NE(csv.find("meet_le_4_hit,5,<=,4,true,false"), std::string::npos);
    EXPECT_NE(csv.find("vt_meet_le_2_hit,5,<=,2,true,na"), std::string::npos);
}

TEST(Verify, AsymptoticEntriesNeverFail) {
    MeasuredQuantities mq;
    mq.n = 64;
    mq.t_meet = 10.0;
    Estimate coal;
    coal.mean = 1e9;
    mq.t_coal_estimate = coal;
    const auto report = verify_relations(mq, {.require_exact = false});
    EXPECT_TRUE(report.all_explicit_passed());
    const auto* e = report.find("coal_over_meet_log_n");
    ASSERT_NE(e, nullptr);
    EXPECT_FALSE(e->explicit_constants);
    EXPECT_FALSE(e->passed.has_value());
    EXPECT_NEAR(e->ratio(), 1e9 / (10.0 * std::log(64.0)), 1e-3);
}

TEST(Concentration, SingleVertexIndicatorOnCycle) {
    const Graph g = make(Family::cycle, 16);
    const std::vector<Vertex> target{0};
    const double th = t_hit(g);
    const auto rep = check_concentration(g, target, std::size_t(std::ceil(th)), 400, 5);
    EXPECT_DOUBLE_EQ(rep.f_bar, 1.0 / 16.0);
    EXPECT_DOUBLE_EQ(rep.t_plus, std::ceil(th));
    EXPECT_DOUBLE_EQ(rep.mean_bound, 8.0 * rep.t_plus / 16.0);
    EXPECT_EQ(rep.worst_start, 0u); // starting on the target maximises visits
    EXPECT_TRUE(rep.passed());
    for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(rep.tails[std::size_t(k)].lambda, k + 1);
        EXPECT_TRUE(rep.tails[std::size_t(k)].passed);
    }
}

TEST(Concentration, Arguments) {
    const Graph g = make(Family::cycle, 6);
    const std::vector<double> short_f(5, 0.5);
    EXPECT_THROW(check_concentration(g, short_f, 10, 10, 1, 9.0), LengthMismatch);
    const std::vector<double> big_f(6, 2.0);
    EXPECT_THROW(check_concentration(g, big_f, 10, 10, 1, 9.0), std::invalid_argument);
}

TEST(Concentration, Deterministic) {
    const Graph g = make(Family::star, 10);
    const std::vector<Vertex> target{3};
    const auto a = check_concentration(g, target, 40, 50, 8);
    const auto b = check_concentration(g, target, 40, 50, 8);
    EXPECT_EQ(a.worst_mean, b.worst_mean);
    EXPECT_EQ(a.tails[0].frequency, b.tails[0].frequency);
}

TEST(Concentration, CollisionFunctional) {
    const Graph g = make(Family::cycle, 16);
    const std::vector<Vertex> set{0, 1, 2, 3};
    const double th = t_hit(g);
    const auto rep = check_collision_concentration(g, set, 1, std::size_t(th), 500, 3, th);
    // Upsilon = 16 gamma_S T+ max pi(w) with gamma_S = 1 on the cycle.
    EXPECT_NEAR(rep.mean_bound, 16.0 * rep.t_plus / 16.0, 1e-12);
    EXPECT_TRUE(rep.passed());
    EXPECT_GT(rep.worst_mean, 1.0); // at least the t = 0 term p^0_{u,u} = 1
    EXPECT_THROW(check_collision_concentration(g, set, 9, 10, 10, 3, th), std::invalid_argument);
}
