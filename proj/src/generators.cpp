#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "crw/errors.hpp"
#include "crw/graph.hpp"
#include "crw/rng.hpp"

namespace crw {

namespace {

constexpr int kMaxRetries = 1000;

constexpr std::array<std::pair<Family, std::string_view>, 11> kFamilyNames{{
    {Family::path, "path"},
    {Family::cycle, "cycle"},
    {Family::clique, "clique"},
    {Family::star, "star"},
    {Family::binary_tree, "binary_tree"},
    {Family::hypercube, "hypercube"},
    {Family::torus, "torus"},
    {Family::grid, "grid"},
    {Family::barbell, "barbell"},
    {Family::random_regular, "random_regular"},
    {Family::lower_bound, "lower_bound"},
}};

// ceil(x) that tolerates representation error just above an integer.
std::size_t ceil_size(double x) {
    return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

std::size_t ceil_sqrt(std::size_t n) {
    auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) {
        --r;
    }
    while (r * r < n) {
        ++r;
    }
    return r;
}

std::size_t checked_pow(std::size_t base, std::size_t exp) {
    std::size_t out = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (out > (std::size_t{1} << 31) / base) {
            throw InvalidSpec("graph too large");
        }
        out *= base;
    }
    return out;
}

void require(bool ok, const FamilySpec& spec, const char* why) {
    if (!ok) {
        throw InvalidSpec(spec.label() + ": " + why);
    }
}

Graph path_graph(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        e.emplace_back(i, i + 1);
    }
    return Graph::from_edges(n, e);
}

Graph cycle_graph(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i) {
        e.emplace_back(i, (i + 1) % n);
    }
    return Graph::from_edges(n, e);
}

void add_clique(std::vector<Edge>& e, Vertex first, std::size_t size) {
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = i + 1; j < size; ++j) {
            e.emplace_back(first + i, first + j);
        }
    }
}

Graph clique_graph(std::size_t n) {
    std::vector<Edge> e;
    add_clique(e, 0, n);
    return Graph::from_edges(n, e);
}

Graph star_graph(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t i = 1; i < n; ++i) {
        e.emplace_back(0, i);
    }
    return Graph::from_edges(n, e);
}

// Heap layout: children of i are 2i+1 and 2i+2.
Graph binary_tree_graph(std::size_t levels) {
    const std::size_t n = checked_pow(2, levels) - 1;
    std::vector<Edge> e;
    for (std::size_t i = 1; i < n; ++i) {
        e.emplace_back((i - 1) / 2, i);
    }
    return Graph::from_edges(n, e);
}

Graph hypercube_graph(std::size_t dim) {
    const std::size_t n = checked_pow(2, dim);
    std::vector<Edge> e;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t b = 0; b < dim; ++b) {
            const std::size_t v = u ^ (std::size_t{1} << b);
            if (u < v) {
                e.emplace_back(u, v);
            }
        }
    }
    return Graph::from_edges(n, e);
}

// Lattice with row-major coordinates; `wrap` closes each axis into a cycle.
Graph lattice_graph(std::size_t dim, std::size_t side, bool wrap) {
    const std::size_t n = checked_pow(side, dim);
    std::vector<Edge> e;
    std::size_t stride = 1;
    for (std::size_t axis = 0; axis < dim; ++axis) {
        for (std::size_t u = 0; u < n; ++u) {
            const std::size_t coord = (u / stride) % side;
            if (coord + 1 < side) {
                e.emplace_back(u, u + stride);
            } else if (wrap) {
                e.emplace_back(u, u - coord * stride);
            }
        }
        stride *= side;
    }
    return Graph::from_edges(n, e);
}

// Two cliques of floor(n/4) vertices; a path over the remaining vertices whose
// endpoints attach to one vertex of each clique.
Graph barbell_graph(std::size_t n) {
    const std::size_t q = n / 4;
    const std::size_t len = n - 2 * q;
    std::vector<Edge> e;
    add_clique(e, 0, q);
    add_clique(e, static_cast<Vertex>(q), q);
    const auto p0 = static_cast<Vertex>(2 * q);
    for (std::size_t i = 0; i + 1 < len; ++i) {
        e.emplace_back(p0 + i, p0 + i + 1);
    }
    e.emplace_back(0, p0);
    e.emplace_back(static_cast<Vertex>(q), static_cast<Vertex>(p0 + len - 1));
    return Graph::from_edges(n, e);
}

// Pairing model: shuffle degree*n stubs and pair neighbours; reject the whole
// pairing on any loop, multi-edge or disconnection.
Graph random_regular_graph(std::size_t n, std::size_t r, std::uint64_t seed) {
    rng::SplitMix64 gen(rng::keyed(seed, 0x72726567, n, r));
    std::vector<Vertex> stubs(n * r);
    for (std::size_t i = 0; i < stubs.size(); ++i) {
        stubs[i] = static_cast<Vertex>(i / r);
    }
    std::unordered_set<std::uint64_t> seen;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        gen.shuffle(stubs.begin(), stubs.end());
        seen.clear();
        std::vector<Edge> e;
        bool ok = true;
        for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
            Vertex u = stubs[i];
            Vertex v = stubs[i + 1];
            if (u == v) {
                ok = false;
                break;
            }
            if (u > v) {
                std::swap(u, v);
            }
            ok = seen.insert((std::uint64_t{u} << 32) | v).second;
            e.emplace_back(u, v);
        }
        if (!ok) {
            continue;
        }
        try {
            return Graph::from_edges(n, e);
        } catch (const DisconnectedGraph&) {
        }
    }
    throw GenerationFailure("random_regular(n=" + std::to_string(n) + ", degree=" +
                            std::to_string(r) + ") rejected " + std::to_string(kMaxRetries) +
                            " pairings");
}

// Union of `r` uniformly random perfect matchings between two sides of size
// `side`. Parallel edges are removed by degree-preserving switches
// (l,x),(l',y) -> (l,y),(l',x). Returns edges with left ids in [0, side) and
// right ids in [side, 2*side).
std::vector<Edge> random_bipartite_regular(std::size_t side, std::size_t r, rng::SplitMix64& gen) {
    const std::size_t total = side * r;
    auto key = [](std::size_t l, std::size_t x) { return (std::uint64_t(l) << 32) | x; };

    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        edges.reserve(total);
        std::vector<std::size_t> perm(side);
        for (std::size_t k = 0; k < r; ++k) {
            for (std::size_t i = 0; i < side; ++i) {
                perm[i] = i;
            }
            gen.shuffle(perm.begin(), perm.end());
            for (std::size_t l = 0; l < side; ++l) {
                edges.emplace_back(l, perm[l]);
            }
        }

        std::unordered_multiset<std::uint64_t> present;
        present.reserve(total * 2);
        for (const auto& [l, x] : edges) {
            present.insert(key(l, x));
        }

        bool ok = true;
        const std::size_t switch_budget = 64 * total + 1024;
        std::size_t switches = 0;
        for (std::size_t i = 0; i < edges.size() && ok; ++i) {
            while (present.count(key(edges[i].first, edges[i].second)) > 1) {
                if (++switches > switch_budget) {
                    ok = false;
                    break;
                }
                const std::size_t j = gen.below(total);
                const auto [l, x] = edges[i];
                const auto [l2, y] = edges[j];
                if (l == l2 || x == y || present.count(key(l, y)) || present.count(key(l2, x))) {
                    continue;
                }
                present.erase(present.find(key(l, x)));
                present.erase(present.find(key(l2, y)));
                edges[i] = {l, y};
                edges[j] = {l2, x};
                present.insert(key(l, y));
                present.insert(key(l2, x));
            }
        }
        if (!ok) {
            continue;
        }
        std::vector<Edge> out;
        out.reserve(total);
        for (const auto& [l, x] : edges) {
            out.emplace_back(static_cast<Vertex>(l), static_cast<Vertex>(side + x));
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    throw GenerationFailure("bipartite regular expander (side=" + std::to_string(side) +
                            ", degree=" + std::to_string(r) + ")");
}

} // namespace

std::string_view to_string(Family f) noexcept {
    for (const auto& [fam, name] : kFamilyNames) {
        if (fam == f) {
            return name;
        }
    }
    return "unknown";
}

Family family_from_string(std::string_view name) {
    for (const auto& [fam, n] : kFamilyNames) {
        if (n == name) {
            return fam;
        }
    }
    throw InvalidSpec("unknown family '" + std::string(name) + "'");
}

bool is_vertex_transitive(Family f) noexcept {
    switch (f) {
    case Family::cycle:
    case Family::clique:
    case Family::hypercube:
    case Family::torus:
        return true;
    default:
        return false;
    }
}

FamilySpec FamilySpec::sized(Family f, std::size_t size, const FamilySpec& base) {
    FamilySpec s = base;
    s.family = f;
    switch (f) {
    case Family::binary_tree:
        s.levels = size;
        break;
    case Family::hypercube:
        s.dim = size;
        break;
    case Family::torus:
    case Family::grid:
        s.side = size;
        break;
    default:
        s.n = size;
        break;
    }
    return s;
}

FamilySpec FamilySpec::sized(Family f, std::size_t size) { return sized(f, size, FamilySpec{}); }

std::size_t FamilySpec::size() const noexcept {
    switch (family) {
    case Family::binary_tree:
        return levels;
    case Family::hypercube:
        return dim;
    case Family::torus:
    case Family::grid:
        return side;
    default:
        return n;
    }
}

std::string FamilySpec::label() const {
    std::string s(to_string(family));
    switch (family) {
    case Family::binary_tree:
        return s + "(levels=" + std::to_string(levels) + ")";
    case Family::hypercube:
        return s + "(dim=" + std::to_string(dim) + ")";
    case Family::torus:
    case Family::grid:
        return s + "(dim=" + std::to_string(dim) + ",side=" + std::to_string(side) + ")";
    case Family::random_regular:
        return s + "(n=" + std::to_string(n) + ",degree=" + std::to_string(degree) + ")";
    case Family::lower_bound: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "(n=%zu,alpha=%g)", n, alpha);
        return s + buf;
    }
    default:
        return s + "(n=" + std::to_string(n) + ")";
    }
}

LowerBoundLayout lower_bound_layout(std::size_t n, double alpha, double alpha_floor) {
    if (!(alpha >= 1.0) || !(alpha_floor >= 1.0)) {
        throw InvalidSpec("lower_bound: alpha and alpha_floor must be >= 1");
    }
    LowerBoundLayout lay;
    lay.alpha_effective = std::max(alpha, alpha_floor);
    lay.cliques = ceil_sqrt(n);
    lay.clique_size = lay.cliques;
    lay.expander_side = ceil_size(double(n) / (2.0 * std::sqrt(lay.alpha_effective)));
    lay.expander_degree = ceil_sqrt(n);
    lay.hub_expander_links = ceil_size(std::sqrt(double(n) / lay.alpha_effective));

    const std::string where = "lower_bound(n=" + std::to_string(n) + ")";
    if (lay.clique_size < 3) {
        throw InvalidSpec(where + ": clique size below 3");
    }
    if (lay.expander_side < 3 || lay.expander_degree > lay.expander_side) {
        throw InvalidSpec(where + ": expander degree " + std::to_string(lay.expander_degree) +
                          " does not fit a side of " + std::to_string(lay.expander_side));
    }
    if (lay.hub_expander_links < 1 || lay.hub_expander_links > 2 * lay.expander_side) {
        throw InvalidSpec(where + ": hub attachment count out of range");
    }
    return lay;
}

Graph lower_bound_graph(std::size_t n, double alpha, std::uint64_t seed, double alpha_floor) {
    const auto lay = lower_bound_layout(n, alpha, alpha_floor);
    rng::SplitMix64 gen(rng::keyed(seed, 0x6c6f7762, n));

    std::vector<Edge> e;
    for (std::size_t i = 0; i < lay.cliques; ++i) {
        add_clique(e, static_cast<Vertex>(i * lay.clique_size), lay.clique_size);
    }
    const Vertex base = lay.expander_begin();
    for (const auto& [l, x] : random_bipartite_regular(lay.expander_side, lay.expander_degree, gen)) {
        e.emplace_back(base + l, base + x);
    }
    const Vertex hub = lay.hub();
    for (std::size_t i = 0; i < lay.cliques; ++i) {
        e.emplace_back(static_cast<Vertex>(i * lay.clique_size), hub);
    }
    std::vector<Vertex> g2(2 * lay.expander_side);
    for (std::size_t i = 0; i < g2.size(); ++i) {
        g2[i] = base + static_cast<Vertex>(i);
    }
    gen.shuffle(g2.begin(), g2.end());
    for (std::size_t i = 0; i < lay.hub_expander_links; ++i) {
        e.emplace_back(g2[i], hub);
    }
    return Graph::from_edges(lay.vertex_count(), e);
}

Graph generate(const FamilySpec& spec, std::uint64_t seed) {
    switch (spec.family) {
    case Family::path:
        require(spec.n >= 2, spec, "needs n >= 2");
        return path_graph(spec.n);
    case Family::cycle:
        require(spec.n >= 3, spec, "needs n >= 3");
        return cycle_graph(spec.n);
    case Family::clique:
        require(spec.n >= 2, spec, "needs n >= 2");
        return clique_graph(spec.n);
    case Family::star:
        require(spec.n >= 2, spec, "needs n >= 2");
        return star_graph(spec.n);
    case Family::binary_tree:
        require(spec.levels >= 2 && spec.levels <= 30, spec, "needs 2 <= levels <= 30");
        return binary_tree_graph(spec.levels);
    case Family::hypercube:
        require(spec.dim >= 1 && spec.dim <= 30, spec, "needs 1 <= dim <= 30");
        return hypercube_graph(spec.dim);
    case Family::torus:
        require(spec.dim >= 1 && spec.side >= 3, spec, "needs dim >= 1 and side >= 3");
        return lattice_graph(spec.dim, spec.side, true);
    case Family::grid:
        require(spec.dim >= 1 && spec.side >= 2, spec, "needs dim >= 1 and side >= 2");
        return lattice_graph(spec.dim, spec.side, false);
    case Family::barbell:
        require(spec.n >= 8, spec, "needs n >= 8");
        return barbell_graph(spec.n);
    case Family::random_regular:
        require(spec.degree >= 3, spec, "needs degree >= 3");
        require(spec.degree < spec.n, spec, "needs degree < n");
        require((spec.degree * spec.n) % 2 == 0, spec, "degree * n must be even");
        return random_regular_graph(spec.n, spec.degree, seed);
    case Family::lower_bound:
        return lower_bound_graph(spec.n, spec.alpha, seed, spec.alpha_floor);
    }
    throw InvalidSpec("unhandled family");
}

} // namespace crw
