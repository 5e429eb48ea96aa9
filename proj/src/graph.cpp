#include "crw/graph.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <queue>
#include <sstream>

#include "crw/errors.hpp"

namespace crw {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
    if (n == 0) {
        throw InvalidSpec("graph must have at least one vertex");
    }
    if (n > std::numeric_limits<Vertex>::max()) {
        throw InvalidSpec("vertex count exceeds 32-bit id range");
    }
    std::vector<std::size_t> degree(n, 0);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) {
            throw InvalidSpec("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") references a vertex >= n=" + std::to_string(n));
        }
        if (u == v) {
            throw SelfLoop("vertex " + std::to_string(u));
        }
        ++degree[u];
        ++degree[v];
    }

    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) {
        g.offsets_[u + 1] = g.offsets_[u] + degree[u];
    }
    g.neighbors_.resize(g.offsets_[n]);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        g.neighbors_[cursor[u]++] = v;
        g.neighbors_[cursor[v]++] = u;
    }

    // Sort and dedup each row, then compact.
    std::size_t write = 0;
    std::vector<std::size_t> compact(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) {
        auto first = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]);
        auto last = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]);
        std::sort(first, last);
        last = std::unique(first, last);
        for (auto it = first; it != last; ++it) {
            g.neighbors_[write++] = *it;
        }
        compact[u + 1] = write;
    }
    g.neighbors_.resize(write);
    g.neighbors_.shrink_to_fit();
    g.offsets_ = std::move(compact);

    g.deg_max_ = 0;
    g.deg_min_ = std::numeric_limits<std::uint32_t>::max();
    for (Vertex u = 0; u < n; ++u) {
        g.deg_max_ = std::max(g.deg_max_, g.degree(u));
        g.deg_min_ = std::min(g.deg_min_, g.degree(u));
    }

    if (n > 1) {
        const auto dist = bfs_distances(g, 0);
        const auto unreached = std::count(dist.begin(), dist.end(),
                                          std::numeric_limits<std::size_t>::max());
        if (unreached > 0) {
            throw DisconnectedGraph(std::to_string(unreached) + " of " + std::to_string(n) +
                                    " vertices unreachable from vertex 0");
        }
    }
    return g;
}

bool Graph::has_edge(Vertex u, Vertex v) const noexcept {
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(m());
    for (Vertex u = 0; u < n(); ++u) {
        for (Vertex v : neighbors(u)) {
            if (u < v) {
                out.emplace_back(u, v);
            }
        }
    }
    return out;
}

std::vector<std::size_t> bfs_distances(const Graph& g, Vertex source) {
    constexpr auto unreached = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(g.n(), unreached);
    std::queue<Vertex> frontier;
    dist[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        const Vertex u = frontier.front();
        frontier.pop();
        for (Vertex v : g.neighbors(u)) {
            if (dist[v] == unreached) {
                dist[v] = dist[u] + 1;
                frontier.push(v);
            }
        }
    }
    return dist;
}

Graph load_edge_list(std::string_view text) {
    std::vector<Edge> edges;
    std::size_t max_id = 0;
    bool any = false;
    std::size_t line_no = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        ++line_no;
        auto line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }

        std::vector<std::uint64_t> ids;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
                ++i;
            }
            if (i >= line.size()) {
                break;
            }
            std::uint64_t value = 0;
            const auto* begin = line.data() + i;
            const auto [ptr, ec] = std::from_chars(begin, line.data() + line.size(), value);
            if (ec != std::errc{} || (ptr != line.data() + line.size() && *ptr != ' ' &&
                                      *ptr != '\t' && *ptr != '\r')) {
                throw ParseError("line " + std::to_string(line_no) + ": expected a vertex id");
            }
            if (value > std::numeric_limits<Vertex>::max() - 1) {
                throw ParseError("line " + std::to_string(line_no) + ": vertex id out of range");
            }
            ids.push_back(value);
            i = static_cast<std::size_t>(ptr - line.data());
        }
        if (ids.empty()) {
            continue;
        }
        if (ids.size() != 2) {
            throw ParseError("line " + std::to_string(line_no) + ": expected exactly two ids, got " +
                             std::to_string(ids.size()));
        }
        if (ids[0] == ids[1]) {
            throw SelfLoop("line " + std::to_string(line_no) + ": vertex " + std::to_string(ids[0]));
        }
        edges.emplace_back(static_cast<Vertex>(ids[0]), static_cast<Vertex>(ids[1]));
        max_id = std::max<std::size_t>(max_id, std::max(ids[0], ids[1]));
        any = true;
    }
    if (!any) {
        throw ParseError("no edges found");
    }
    return Graph::from_edges(max_id + 1, edges);
}

std::string to_edge_list(const Graph& g) {
    std::ostringstream out;
    for (const auto& [u, v] : g.edges()) {
        out << u << ' ' << v << '\n';
    }
    return out.str();
}

DiagnosticsReport validate(const Graph& g) {
    DiagnosticsReport r;
    r.n = g.n();
    r.m = g.m();
    r.deg_max = g.deg_max();
    r.deg_min = g.deg_min();
    r.deg_avg = g.deg_avg();
    r.gamma = g.gamma();

    std::size_t degree_sum = 0;
    r.symmetric = true;
    r.simple = true;
    for (Vertex u = 0; u < g.n(); ++u) {
        const auto nb = g.neighbors(u);
        degree_sum += nb.size();
        for (std::size_t i = 0; i < nb.size(); ++i) {
            if (nb[i] == u || (i > 0 && nb[i] <= nb[i - 1])) {
                r.simple = false;
            }
            if (!g.has_edge(nb[i], u)) {
                r.symmetric = false;
            }
        }
    }
    r.handshake = degree_sum == 2 * g.m();
    if (g.n() > 1 && g.deg_min() == 0) {
        r.simple = false;
    }

    if (g.n() > 0) {
        const auto dist = bfs_distances(g, 0);
        constexpr auto unreached = std::numeric_limits<std::size_t>::max();
        r.connected = std::none_of(dist.begin(), dist.end(),
                                   [](std::size_t d) { return d == unreached; });
        // BFS layering 2-colours a connected graph iff no edge joins equal layers.
        r.bipartite = r.connected;
        for (Vertex u = 0; u < g.n() && r.bipartite; ++u) {
            for (Vertex v : g.neighbors(u)) {
                if (dist[u] % 2 == dist[v] % 2) {
                    r.bipartite = false;
                    break;
                }
            }
        }
    }
    return r;
}

} // namespace crw
