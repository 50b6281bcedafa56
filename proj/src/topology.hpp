#pragma once

#include <vector>

#include "config.hpp"

namespace resipi {

struct RouterCoord {
    int chiplet = -1;
    int row = 0;
    int col = 0;
    bool operator==(const RouterCoord&) const = default;
};

struct GatewayInfo {
    int id = -1;           // global gateway index, also its MRG index
    int chiplet = -1;      // -1 for memory gateways
    int local_index = -1;  // position in the chiplet's activation order
    bool is_memory = false;
    RouterCoord router;    // attach point; unused for memory gateways
    int mem_node = -1;     // endpoint node id for memory gateways
};

// Immutable system graph: per-chiplet router grids plus gateway descriptors.
// Node ids: chiplet routers first (chiplet-major, row-major), then one node
// per memory endpoint.
struct Topology {
    int num_chiplets = 0;
    int mesh_rows = 0;
    int mesh_cols = 0;
    int gateways_per_chiplet = 0;
    int mem_gateway_count = 0;
    std::vector<GatewayInfo> gateways;          // size N; core first, memory appended
    std::vector<std::vector<int>> gateway_at;   // [chiplet][router] -> gateway id or -1

    int routers_per_chiplet() const { return mesh_rows * mesh_cols; }
    int core_node_count() const { return num_chiplets * routers_per_chiplet(); }
    int total_node_count() const { return core_node_count() + mem_gateway_count; }
    int total_gateways() const { return static_cast<int>(gateways.size()); }

    int router_index(int row, int col) const { return row * mesh_cols + col; }
    int node_id(const RouterCoord& c) const {
        return c.chiplet * routers_per_chiplet() + router_index(c.row, c.col);
    }
    bool is_memory_node(int node) const { return node >= core_node_count(); }
    int memory_index_of_node(int node) const { return node - core_node_count(); }
    RouterCoord coord_of(int node) const {
        int rpc = routers_per_chiplet();
        RouterCoord c;
        c.chiplet = node / rpc;
        int r = node % rpc;
        c.row = r / mesh_cols;
        c.col = r % mesh_cols;
        return c;
    }
    int chiplet_of_node(int node) const {
        return is_memory_node(node) ? -1 : node / routers_per_chiplet();
    }
    int chiplet_gateway_id(int chiplet, int local_index) const {
        return chiplet * gateways_per_chiplet + local_index;
    }
    int memory_gateway_id(int mem_index) const {
        return num_chiplets * gateways_per_chiplet + mem_index;
    }
};

// Default placement anchors for G = 1..4: the four routers around the mesh
// center, in activation order. Larger G (or degenerate meshes where anchors
// collide) requires explicit gateway.<chiplet>.<idx> keys in the config.
std::vector<std::pair<int, int>> default_gateway_anchors(int rows, int cols, int g);

Topology build_topology(const SystemConfig& config);

// --- Interposer layout ------------------------------------------------------

struct MrgNode {
    int index = 0;               // 0-based; MRG_k in 1-based terms is index k-1
    int modulator_positions = 0; // = wavelengths
    int filter_rows = 0;         // = N-1
    bool rotated_180 = false;    // even physical rows are flipped; metadata only
};

struct PcmcNode {
    int index = 0;
    bool rotated_180 = false;
};

enum class PortKind { MrgIn, MrgOut, PcmcIn, PcmcCross, PcmcBar, Laser, Terminator };

struct Port {
    PortKind kind = PortKind::Laser;
    int element = -1;  // MRG or PCMC index; -1 for laser/terminator
    int channel = -1;  // waveguide port index j (0-based) for MRG ports
    bool operator==(const Port&) const = default;
};

struct WireEdge {
    Port from;
    Port to;
};

// The MRG/PCMC wiring graph: N MRGs, N-1 PCMCs chained off the laser, each
// MRG crossed by N waveguides whose port index advances by one per MRG hop.
struct InterposerLayout {
    int n = 0;            // gateway/MRG count
    int wavelengths = 0;
    std::vector<MrgNode> mrgs;
    std::vector<PcmcNode> pcmcs;
    std::vector<WireEdge> edges;
};

InterposerLayout build_interposer(int n_gateways, int wavelengths);

}  // namespace resipi
