#include "selection.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace resipi {

int xy_distance(int r0, int c0, int r1, int c1) {
    return std::abs(r0 - r1) + std::abs(c0 - c1);
}

namespace {

// Small transportation solver: source -> center (capacity quota) -> item
// (capacity 1) -> sink, unit costs on center-item edges. Graphs here have a
// few dozen nodes, so successive shortest paths with Bellman-Ford is plenty.
struct MinCostFlow {
    struct Edge {
        int to, cap, cost, flow = 0;
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> adj;

    explicit MinCostFlow(int nodes) : adj(nodes) {}

    void add(int from, int to, int cap, int cost) {
        adj[from].push_back(static_cast<int>(edges.size()));
        edges.push_back({to, cap, cost});
        adj[to].push_back(static_cast<int>(edges.size()));
        edges.push_back({from, 0, -cost});
    }

    // Returns total cost of a max flow from s to t.
    int solve(int s, int t) {
        int total_cost = 0;
        const int inf = std::numeric_limits<int>::max() / 2;
        while (true) {
            std::vector<int> dist(adj.size(), inf), prev_edge(adj.size(), -1);
            dist[s] = 0;
            bool changed = true;
            while (changed) {  // Bellman-Ford; deterministic relaxation order
                changed = false;
                for (size_t u = 0; u < adj.size(); ++u) {
                    if (dist[u] == inf) continue;
                    for (int ei : adj[u]) {
                        const Edge& e = edges[ei];
                        if (e.cap - e.flow > 0 && dist[u] + e.cost < dist[e.to]) {
                            dist[e.to] = dist[u] + e.cost;
                            prev_edge[e.to] = ei;
                            changed = true;
                        }
                    }
                }
            }
            if (dist[t] == inf) break;
            int push = inf;
            for (int v = t; v != s;) {
                const Edge& e = edges[prev_edge[v]];
                push = std::min(push, e.cap - e.flow);
                v = edges[prev_edge[v] ^ 1].to;
            }
            for (int v = t; v != s;) {
                edges[prev_edge[v]].flow += push;
                edges[prev_edge[v] ^ 1].flow -= push;
                v = edges[prev_edge[v] ^ 1].to;
            }
            total_cost += push * dist[t];
        }
        return total_cost;
    }
};

}  // namespace

std::vector<int> balanced_assignment(const std::vector<std::pair<int, int>>& items,
                                     const std::vector<std::pair<int, int>>& centers,
                                     const std::vector<int>& quotas) {
    int n = static_cast<int>(items.size());
    int g = static_cast<int>(centers.size());
    int s = n + g, t = n + g + 1;
    MinCostFlow flow(n + g + 2);
    for (int c = 0; c < g; ++c) flow.add(s, n + c, quotas[c], 0);
    for (int c = 0; c < g; ++c)
        for (int i = 0; i < n; ++i)
            flow.add(n + c, i,
                     1,
                     xy_distance(centers[c].first, centers[c].second, items[i].first,
                                 items[i].second));
    for (int i = 0; i < n; ++i) flow.add(i, t, 1, 0);
    flow.solve(s, t);

    std::vector<int> assign(n, -1);
    for (size_t ei = 0; ei < flow.edges.size(); ei += 2) {
        const auto& e = flow.edges[ei];
        int from = flow.edges[ei ^ 1].to;
        if (from >= n && from < n + g && e.to < n && e.flow > 0) assign[e.to] = from - n;
    }
    return assign;
}

namespace {

int assignment_cost(const std::vector<int>& assign,
                    const std::vector<std::pair<int, int>>& items,
                    const std::vector<std::pair<int, int>>& centers) {
    int cost = 0;
    for (size_t i = 0; i < items.size(); ++i)
        cost += xy_distance(centers[assign[i]].first, centers[assign[i]].second,
                            items[i].first, items[i].second);
    return cost;
}

// Best balanced partition of routers over the first g gateways. When R % g
// != 0 every way of handing out the remainder slots is tried; equal-cost
// ties go to the distribution that favors lower gateway indices.
std::vector<int> best_partition(const std::vector<std::pair<int, int>>& routers,
                                const std::vector<std::pair<int, int>>& centers) {
    int n = static_cast<int>(routers.size());
    int g = static_cast<int>(centers.size());
    int base = n / g, extra = n % g;

    std::vector<int> best;
    int best_cost = std::numeric_limits<int>::max();
    // iterate subsets of size `extra` in an order that tries low indices first
    std::vector<std::vector<int>> combos;
    std::vector<int> idx(extra);
    for (int i = 0; i < extra; ++i) idx[i] = i;
    if (extra == 0) combos.push_back({});
    while (extra > 0) {
        combos.push_back(idx);
        int i = extra - 1;
        while (i >= 0 && idx[i] == g - extra + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < extra; ++j) idx[j] = idx[j - 1] + 1;
    }
    for (const auto& combo : combos) {
        std::vector<int> quotas(g, base);
        for (int c : combo) ++quotas[c];
        std::vector<int> assign = balanced_assignment(routers, centers, quotas);
        int cost = assignment_cost(assign, routers, centers);
        if (cost < best_cost) {
            best_cost = cost;
            best = assign;
        }
    }
    return best;
}

}  // namespace

SelectionTable build_selection_table(int mesh_rows, int mesh_cols,
                                     const std::vector<std::pair<int, int>>& gateway_routers) {
    SelectionTable t;
    t.mesh_rows = mesh_rows;
    t.mesh_cols = mesh_cols;
    t.g_max = static_cast<int>(gateway_routers.size());
    t.gateway_routers = gateway_routers;

    std::vector<std::pair<int, int>> routers;
    for (int r = 0; r < mesh_rows; ++r)
        for (int c = 0; c < mesh_cols; ++c) routers.push_back({r, c});

    for (int g = 1; g <= t.g_max; ++g) {
        std::vector<std::pair<int, int>> centers(gateway_routers.begin(),
                                                 gateway_routers.begin() + g);
        t.source_partition.push_back(best_partition(routers, centers));
    }

    uint32_t masks = (1u << t.g_max) - 1;
    t.dest_choice.assign(masks, std::vector<int>(routers.size(), -1));
    for (uint32_t mask = 1; mask <= masks; ++mask) {
        for (size_t ri = 0; ri < routers.size(); ++ri) {
            int best = -1, best_d = std::numeric_limits<int>::max();
            for (int gi = 0; gi < t.g_max; ++gi) {
                if (!(mask & (1u << gi))) continue;
                int d = xy_distance(gateway_routers[gi].first, gateway_routers[gi].second,
                                    routers[ri].first, routers[ri].second);
                if (d < best_d) {
                    best_d = d;
                    best = gi;
                }
            }
            t.dest_choice[mask - 1][ri] = best;
        }
    }
    return t;
}

int SelectionTable::source_gateway_for(int row, int col, int g) const {
    if (g < 1 || g > g_max) throw std::invalid_argument("active gateway count out of range");
    return source_partition[g - 1][row * mesh_cols + col];
}

int SelectionTable::dest_gateway_for(int row, int col, uint32_t active_mask) const {
    if (active_mask == 0 || active_mask >= (1u << g_max))
        throw std::invalid_argument("destination active set must be a non-empty mask");
    return dest_choice[active_mask - 1][row * mesh_cols + col];
}

std::string SelectionTable::dump() const {
    std::ostringstream os;
    for (int g = 1; g <= g_max; ++g) {
        os << "source partition, " << g << " active gateway" << (g > 1 ? "s" : "") << ":\n";
        for (int r = 0; r < mesh_rows; ++r) {
            os << "  ";
            for (int c = 0; c < mesh_cols; ++c)
                os << "G" << source_partition[g - 1][r * mesh_cols + c] + 1
                   << (c + 1 < mesh_cols ? " " : "");
            os << "\n";
        }
    }
    for (uint32_t mask = 1; mask < (1u << g_max); ++mask) {
        os << "destination choice, active set {";
        bool first = true;
        for (int gi = 0; gi < g_max; ++gi)
            if (mask & (1u << gi)) {
                os << (first ? "" : ",") << "G" << gi + 1;
                first = false;
            }
        os << "}:\n";
        for (int r = 0; r < mesh_rows; ++r) {
            os << "  ";
            for (int c = 0; c < mesh_cols; ++c)
                os << "G" << dest_choice[mask - 1][r * mesh_cols + c] + 1
                   << (c + 1 < mesh_cols ? " " : "");
            os << "\n";
        }
    }
    return os.str();
}

std::vector<SelectionTable> build_selection_tables(const Topology& topo) {
    std::vector<SelectionTable> tables;
    for (int c = 0; c < topo.num_chiplets; ++c) {
        std::vector<std::pair<int, int>> gws;
        for (int i = 0; i < topo.gateways_per_chiplet; ++i) {
            const GatewayInfo& g = topo.gateways[topo.chiplet_gateway_id(c, i)];
            gws.push_back({g.router.row, g.router.col});
        }
        tables.push_back(build_selection_table(topo.mesh_rows, topo.mesh_cols, gws));
    }
    return tables;
}

}  // namespace resipi
