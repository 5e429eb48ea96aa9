#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "crw/errors.hpp"
#include "crw/graph.hpp"
#include "crw/markov.hpp"

using namespace crw;

namespace {

FamilySpec spec_of(Family f, std::size_t size) {
    FamilySpec base;
    if (f == Family::torus || f == Family::grid) {
        base.dim = 2;
    }
    if (f == Family::random_regular) {
        base.degree = 3;
    }
    return FamilySpec::sized(f, size, base);
}

} // namespace

TEST(Generators, CycleFour) {
    const Graph g = generate(spec_of(Family::cycle, 4));
    EXPECT_EQ(g.n(), 4u);
    EXPECT_EQ(g.m(), 4u);
    for (Vertex u = 0; u < 4; ++u) {
        EXPECT_EQ(g.degree(u), 2u);
    }
}

TEST(Generators, HypercubeDimThree) {
    const Graph g = generate(spec_of(Family::hypercube, 3));
    EXPECT_EQ(g.n(), 8u);
    EXPECT_EQ(g.m(), 12u);
    EXPECT_EQ(g.deg_min(), 3u);
    EXPECT_EQ(g.deg_max(), 3u);
}

TEST(Generators, BarbellSixteen) {
    const Graph g = generate(spec_of(Family::barbell, 16));
    EXPECT_EQ(g.n(), 16u);
    // Two K4 (6 edges each) and a path of 8 vertices hooked to both: 7 + 2 edges.
    EXPECT_EQ(g.m(), 6u + 6u + 9u);
    const auto d = validate(g);
    EXPECT_EQ(d.deg_max, 4u);
    EXPECT_EQ(d.deg_min, 2u);
    EXPECT_TRUE(d.ok());
}

TEST(Generators, BinaryTreeAndTorus) {
    const Graph tree = generate(spec_of(Family::binary_tree, 4));
    EXPECT_EQ(tree.n(), 15u);
    EXPECT_EQ(tree.m(), 14u);
    EXPECT_EQ(tree.degree(0), 2u);

    FamilySpec s;
    s.family = Family::torus;
    s.dim = 3;
    s.side = 4;
    const Graph torus = generate(s);
    EXPECT_EQ(torus.n(), 64u);
    EXPECT_EQ(torus.m(), 3u * 64u);
    EXPECT_EQ(torus.deg_min(), 6u);
    EXPECT_EQ(torus.deg_max(), 6u);

    s.family = Family::grid;
    s.dim = 2;
    s.side = 3;
    const Graph grid = generate(s);
    EXPECT_EQ(grid.n(), 9u);
    EXPECT_EQ(grid.m(), 12u);
}

TEST(Generators, EveryFamilyValidates) {
    for (Family f : {Family::path, Family::cycle, Family::clique, Family::star,
                     Family::binary_tree, Family::hypercube, Family::torus, Family::grid,
                     Family::barbell, Family::random_regular, Family::lower_bound}) {
        std::size_t size = 64;
        if (f == Family::binary_tree) size = 6;
        if (f == Family::hypercube) size = 6;
        if (f == Family::torus || f == Family::grid) size = 8;
        const Graph g = generate(spec_of(f, size), 11);
        const auto d = validate(g);
        EXPECT_TRUE(d.ok()) << to_string(f);
        std::size_t degree_sum = 0;
        for (Vertex u = 0; u < g.n(); ++u) {
            degree_sum += g.degree(u);
        }
        EXPECT_EQ(degree_sum, 2 * g.m()) << to_string(f);
        const auto dist = bfs_distances(g, 0);
        EXPECT_TRUE(std::none_of(dist.begin(), dist.end(),
                                 [](std::size_t x) { return x == SIZE_MAX; }))
            << to_string(f);
        if (is_vertex_transitive(f)) {
            EXPECT_EQ(g.deg_min(), g.deg_max()) << to_string(f);
        }
    }
}

TEST(Generators, RandomRegularIsRegularAndDeterministic) {
    FamilySpec s = spec_of(Family::random_regular, 50);
    s.degree = 4;
    const Graph a = generate(s, 99);
    const Graph b = generate(s, 99);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.deg_min(), 4u);
    EXPECT_EQ(a.deg_max(), 4u);
    EXPECT_NE(a, generate(s, 100));
}

TEST(Generators, InvalidSpecs) {
    FamilySpec odd = spec_of(Family::random_regular, 9);
    odd.degree = 3;
    EXPECT_THROW(generate(odd), InvalidSpec);
    EXPECT_THROW(generate(spec_of(Family::cycle, 2)), InvalidSpec);
    EXPECT_THROW(generate(spec_of(Family::barbell, 7)), InvalidSpec);
    EXPECT_THROW(family_from_string("moebius"), InvalidSpec);
}

TEST(LowerBound, LayoutAtThousand) {
    const auto lay = lower_bound_layout(1024, 4.0);
    EXPECT_EQ(lay.cliques, 32u);
    EXPECT_EQ(lay.clique_size, 32u);
    EXPECT_EQ(lay.expander_side, 256u);
    EXPECT_EQ(lay.expander_degree, 32u);
    EXPECT_EQ(lay.hub_expander_links, 16u);

    const Graph g = lower_bound_graph(1024, 4.0, 3);
    EXPECT_EQ(g.n(), lay.vertex_count());
    EXPECT_EQ(g.degree(Vertex(lay.hub())), 32u + 16u);
    EXPECT_TRUE(validate(g).ok());
    EXPECT_LE(g.gamma(), 4.0);
}

TEST(LowerBound, SmallestInstanceAndDeterminism) {
    const Graph g = lower_bound_graph(64, 1.0, 5);
    EXPECT_TRUE(validate(g).ok());
    EXPECT_LE(g.gamma(), 4.0);
    EXPECT_EQ(g, lower_bound_graph(64, 1.0, 5));
    for (std::size_t n : {64u, 100u, 256u, 500u}) {
        for (double alpha : {1.0, 4.0, 9.0}) {
            EXPECT_LE(lower_bound_graph(n, alpha, 1).gamma(), 4.0) << n << " " << alpha;
        }
    }
}

TEST(LowerBound, BipartiteExpanderPart) {
    const auto lay = lower_bound_layout(256, 4.0);
    const Graph g = lower_bound_graph(256, 4.0, 17);
    const std::size_t left = lay.expander_begin();
    const std::size_t right = left + lay.expander_side;
    for (std::size_t u = left; u < right; ++u) {
        std::size_t expander_neighbours = 0;
        for (Vertex v : g.neighbors(Vertex(u))) {
            if (v >= left && v < right + lay.expander_side) {
                EXPECT_GE(v, right) << "edge inside the left side";
                ++expander_neighbours;
            }
        }
        EXPECT_EQ(expander_neighbours, lay.expander_degree);
    }
}

TEST(EdgeList, Parsing) {
    const Graph tri = load_edge_list("0 1\n1 2\n2 0");
    EXPECT_EQ(tri.n(), 3u);
    EXPECT_EQ(tri.m(), 3u);
    EXPECT_THROW(load_edge_list("0 0"), SelfLoop);
    EXPECT_THROW(load_edge_list("0 1\n2 3"), DisconnectedGraph);
    EXPECT_THROW(load_edge_list("0 x"), ParseError);
    EXPECT_THROW(load_edge_list("0 1 2"), ParseError);

    const Graph dup = load_edge_list("# comment\n0 1\n1 0\n1 2\n");
    EXPECT_EQ(dup.m(), 2u);
    EXPECT_EQ(load_edge_list(to_edge_list(tri)), tri);
}

TEST(Diagnostics, StarAndCycle) {
    const auto star = validate(generate(spec_of(Family::star, 5)));
    EXPECT_EQ(star.deg_max, 4u);
    EXPECT_EQ(star.deg_min, 1u);
    EXPECT_DOUBLE_EQ(star.gamma, 4.0);
    EXPECT_TRUE(star.bipartite);

    const auto cycle = validate(generate(spec_of(Family::cycle, 8)));
    EXPECT_EQ(cycle.deg_max, 2u);
    EXPECT_EQ(cycle.deg_min, 2u);
    EXPECT_DOUBLE_EQ(cycle.gamma, 1.0);
    EXPECT_TRUE(cycle.bipartite);
    EXPECT_FALSE(validate(generate(spec_of(Family::cycle, 7))).bipartite);
}

TEST(Graph, RejectsBadEdges) {
    const std::vector<Edge> loop{{0, 0}};
    EXPECT_THROW(Graph::from_edges(1, loop), SelfLoop);
    const std::vector<Edge> out_of_range{{0, 5}};
    EXPECT_THROW(Graph::from_edges(2, out_of_range), InvalidSpec);
    const Graph single = Graph::from_edges(1, {});
    EXPECT_EQ(single.n(), 1u);
    EXPECT_EQ(single.m(), 0u);
}

TEST(LowerBound, ExpanderSpectrumIsReported) {
    const auto lay = lower_bound_layout(1024, 4.0);
    const auto es = expander_spectrum(lower_bound_graph(1024, 4.0, 3), lay);
    EXPECT_EQ(es.degree, 32u);
    EXPECT_NEAR(es.ramanujan_bound, 2.0 * std::sqrt(31.0), 1e-12);
    // A random union of permutations is near-Ramanujan; allow a modest margin.
    EXPECT_GT(es.lambda, 0.0);
    EXPECT_LT(es.lambda, 1.25 * es.ramanujan_bound);
}
