#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crw {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Immutable simple undirected connected graph in compressed-row form.
///
/// Vertex ids are 0-based and contiguous. Neighbor lists are sorted, free of
/// self-loops and duplicates, and symmetric. The single-vertex graph (no
/// edges) is admitted as the one degenerate case; every other graph has
/// minimum degree >= 1 and is connected.
class Graph {
public:
    Graph() = default;

    /// Builds from an undirected edge list. Duplicate edges (in either
    /// orientation) are merged; self-loops and disconnected inputs throw.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges);

    std::size_t n() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t m() const noexcept { return neighbors_.size() / 2; }

    std::span<const Vertex> neighbors(Vertex u) const noexcept {
        return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
    }
    std::uint32_t degree(Vertex u) const noexcept {
        return static_cast<std::uint32_t>(offsets_[u + 1] - offsets_[u]);
    }
    bool has_edge(Vertex u, Vertex v) const noexcept;

    std::uint32_t deg_max() const noexcept { return deg_max_; }
    std::uint32_t deg_min() const noexcept { return deg_min_; }
    double deg_avg() const noexcept { return n() == 0 ? 0.0 : 2.0 * double(m()) / double(n()); }
    /// Degree irregularity Delta / delta.
    double gamma() const noexcept {
        return deg_min_ == 0 ? 1.0 : double(deg_max_) / double(deg_min_);
    }

    std::span<const std::size_t> offsets() const noexcept { return offsets_; }
    std::span<const Vertex> adjacency() const noexcept { return neighbors_; }

    /// Each undirected edge once, as (u, v) with u < v, in lexicographic order.
    std::vector<Edge> edges() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<Vertex> neighbors_;
    std::uint32_t deg_max_ = 0;
    std::uint32_t deg_min_ = 0;
};

enum class Family {
    path,
    cycle,
    clique,
    star,
    binary_tree,
    hypercube,
    torus,
    grid,
    barbell,
    random_regular,
    lower_bound,
};

std::string_view to_string(Family f) noexcept;
Family family_from_string(std::string_view name);

/// Whether every member of the family is vertex-transitive.
bool is_vertex_transitive(Family f) noexcept;

/// Parameters for one generated topology. Which fields are read depends on
/// the family:
///   path, cycle, clique, star, barbell  -> n
///   binary_tree                         -> levels (2^levels - 1 vertices)
///   hypercube                           -> dim
///   torus, grid                         -> dim, side
///   random_regular                      -> n, degree
///   lower_bound                         -> n, alpha, alpha_floor
struct FamilySpec {
    Family family = Family::cycle;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::size_t side = 0;
    std::size_t levels = 0;
    std::size_t degree = 0;
    double alpha = 1.0;
    double alpha_floor = 4.0;

    /// The family's scalar size knob (n, levels, dim or side) set to `size`.
    static FamilySpec sized(Family f, std::size_t size, const FamilySpec& base);
    static FamilySpec sized(Family f, std::size_t size);
    /// The family's scalar size knob.
    std::size_t size() const noexcept;
    /// Short human-readable tag, e.g. "torus(dim=3,side=4)".
    std::string label() const;
};

/// Builds the family's textbook graph. `seed` is consumed only by the random
/// families (random_regular, lower_bound).
Graph generate(const FamilySpec& spec, std::uint64_t seed = 0);

/// Component layout of the lower-bound construction: `cliques` copies of a
/// clique on `clique_size` vertices, a bipartite `expander_degree`-regular
/// graph with `expander_side` vertices per side, and one hub adjacent to the
/// first vertex of every clique and to `hub_expander_links` expander vertices.
struct LowerBoundLayout {
    double alpha_effective = 0.0;
    std::size_t cliques = 0;
    std::size_t clique_size = 0;
    std::size_t expander_side = 0;
    std::size_t expander_degree = 0;
    std::size_t hub_expander_links = 0;

    std::size_t vertex_count() const noexcept {
        return cliques * clique_size + 2 * expander_side + 1;
    }
    Vertex hub() const noexcept { return static_cast<Vertex>(vertex_count() - 1); }
    Vertex expander_begin() const noexcept { return static_cast<Vertex>(cliques * clique_size); }
};

LowerBoundLayout lower_bound_layout(std::size_t n, double alpha, double alpha_floor = 4.0);
Graph lower_bound_graph(std::size_t n, double alpha, std::uint64_t seed, double alpha_floor = 4.0);

/// Parses whitespace-separated "u v" pairs with 0-based ids. '#' starts a
/// comment running to end of line.
Graph load_edge_list(std::string_view text);
std::string to_edge_list(const Graph& g);

struct DiagnosticsReport {
    std::size_t n = 0;
    std::size_t m = 0;
    std::uint32_t deg_max = 0;
    std::uint32_t deg_min = 0;
    double deg_avg = 0.0;
    double gamma = 0.0;
    bool connected = false;
    bool bipartite = false;
    bool symmetric = false;
    bool simple = false;
    bool handshake = false; // sum of degrees == 2m

    bool ok() const noexcept { return connected && symmetric && simple && handshake; }
};

DiagnosticsReport validate(const Graph& g);

/// Breadth-first distances from `source`; unreachable vertices get SIZE_MAX.
std::vector<std::size_t> bfs_distances(const Graph& g, Vertex source);

} // namespace crw
