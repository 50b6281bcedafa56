#pragma once

#include <string>
#include <vector>

#include "topology.hpp"

namespace resipi {

// Design-time gateway selection tables for one chiplet.
//
// Source side: for every possible active-gateway count g, a balanced
// partition of the R routers over the first g gateways. Each block has
// floor(R/g) or ceil(R/g) routers and the partition minimizes total XY hop
// distance from routers to their gateway, so blocks sit around each
// gateway's vicinity.
//
// Destination side: for every non-empty activation mask and every router,
// the active gateway with the fewest XY hops to that router, ties to the
// lowest gateway index.
struct SelectionTable {
    int mesh_rows = 0;
    int mesh_cols = 0;
    int g_max = 0;
    std::vector<std::pair<int, int>> gateway_routers;  // local gateway idx -> (row, col)
    // source_partition[g-1][router_index] -> local gateway index in [0, g)
    std::vector<std::vector<int>> source_partition;
    // dest_choice[mask-1][router_index] -> local gateway index
    std::vector<std::vector<int>> dest_choice;

    int routers() const { return mesh_rows * mesh_cols; }
    int source_gateway_for(int row, int col, int g) const;
    int dest_gateway_for(int row, int col, uint32_t active_mask) const;
    std::string dump() const;
};

SelectionTable build_selection_table(int mesh_rows, int mesh_cols,
                                     const std::vector<std::pair<int, int>>& gateway_routers);

// Per-chiplet tables for the whole system.
std::vector<SelectionTable> build_selection_tables(const Topology& topo);

int xy_distance(int r0, int c0, int r1, int c1);

// Minimum-total-distance assignment of `items` to `centers` with per-center
// quotas (successive-shortest-path min-cost flow). Exposed for the partition
// tests' optimality certificate.
std::vector<int> balanced_assignment(const std::vector<std::pair<int, int>>& items,
                                     const std::vector<std::pair<int, int>>& centers,
                                     const std::vector<int>& quotas);

}  // namespace resipi
