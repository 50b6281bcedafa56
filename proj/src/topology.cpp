#include "topology.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace resipi {

std::vector<std::pair<int, int>> default_gateway_anchors(int rows, int cols, int g) {
    int r0 = (rows - 1) / 2, r1 = rows / 2;
    int c0 = (cols - 1) / 2, c1 = cols / 2;
    std::vector<std::pair<int, int>> anchors = {{r0, c0}, {r0, c1}, {r1, c0}, {r1, c1}};
    if (g < 1 || g > 4) return {};
    anchors.resize(g);
    std::set<std::pair<int, int>> uniq(anchors.begin(), anchors.end());
    if (static_cast<int>(uniq.size()) != g) return {};  // anchors collide on tiny meshes
    return anchors;
}

Topology build_topology(const SystemConfig& config) {
    Topology t;
    t.num_chiplets = config.num_chiplets;
    t.mesh_rows = config.mesh_rows;
    t.mesh_cols = config.mesh_cols;
    t.gateways_per_chiplet = config.max_gateways_per_chiplet;
    t.mem_gateway_count = config.mem_gateways;

    // Collect placements: explicit config keys win over the built-in pattern.
    int g = config.max_gateways_per_chiplet;
    std::vector<std::vector<std::pair<int, int>>> placement(config.num_chiplets,
                                                            std::vector<std::pair<int, int>>(g, {-1, -1}));
    std::vector<std::pair<int, int>> anchors =
        default_gateway_anchors(config.mesh_rows, config.mesh_cols, g);
    for (int c = 0; c < config.num_chiplets; ++c)
        for (int i = 0; i < g && i < static_cast<int>(anchors.size()); ++i)
            placement[c][i] = anchors[i];

    for (const auto& p : config.explicit_placements) {
        if (p.chiplet < 0 || p.chiplet >= config.num_chiplets)
            throw ConfigError("gateway placement: chiplet " + std::to_string(p.chiplet) +
                              " out of range");
        if (p.index < 0 || p.index >= g)
            throw ConfigError("gateway placement: index " + std::to_string(p.index) +
                              " out of range (G = " + std::to_string(g) + ")");
        if (p.row < 0 || p.row >= config.mesh_rows || p.col < 0 || p.col >= config.mesh_cols)
            throw ConfigError("gateway placement: router (" + std::to_string(p.row) + "," +
                              std::to_string(p.col) + ") outside the mesh");
        placement[p.chiplet][p.index] = {p.row, p.col};
    }

    t.gateway_at.assign(config.num_chiplets,
                        std::vector<int>(config.mesh_rows * config.mesh_cols, -1));
    for (int c = 0; c < config.num_chiplets; ++c) {
        for (int i = 0; i < g; ++i) {
            auto [row, col] = placement[c][i];
            if (row < 0)
                throw ConfigError(
                    "no built-in gateway placement pattern for mesh " +
                    std::to_string(config.mesh_rows) + "x" + std::to_string(config.mesh_cols) +
                    " with G = " + std::to_string(g) +
                    "; provide gateway.<chiplet>.<idx> = row,col in the config");
            int ridx = t.router_index(row, col);
            if (t.gateway_at[c][ridx] != -1)
                throw ConfigError("two gateways placed on router (" + std::to_string(row) + "," +
                                  std::to_string(col) + ") of chiplet " + std::to_string(c));
            GatewayInfo info;
            info.id = t.chiplet_gateway_id(c, i);
            info.chiplet = c;
            info.local_index = i;
            info.router = {c, row, col};
            t.gateways.push_back(info);
            t.gateway_at[c][ridx] = info.id;
        }
    }
    for (int m = 0; m < config.mem_gateways; ++m) {
        GatewayInfo info;
        info.id = t.memory_gateway_id(m);
        info.is_memory = true;
        info.mem_node = t.core_node_count() + m;
        t.gateways.push_back(info);
    }
    return t;
}

namespace {

Port mrg_in(int mrg, int j) { return {PortKind::MrgIn, mrg, j}; }
Port mrg_out(int mrg, int j) { return {PortKind::MrgOut, mrg, j}; }

}  // namespace

InterposerLayout build_interposer(int n_gateways, int wavelengths) {
    if (n_gateways < 2)
        throw std::invalid_argument("interposer needs at least 2 gateways, got " +
                                    std::to_string(n_gateways));
    if (wavelengths < 1) throw std::invalid_argument("interposer needs at least 1 wavelength");

    InterposerLayout lay;
    lay.n = n_gateways;
    lay.wavelengths = wavelengths;
    int n = n_gateways;

    // Physical rows hold two MRGs each; every second row is mounted flipped.
    for (int k = 0; k < n; ++k) {
        MrgNode m;
        m.index = k;
        m.modulator_positions = wavelengths;
        m.filter_rows = n - 1;
        m.rotated_180 = ((k / 2) % 2) == 1;
        lay.mrgs.push_back(m);
    }
    for (int k = 0; k < n - 1; ++k) {
        PcmcNode p;
        p.index = k;
        p.rotated_180 = ((k / 2) % 2) == 1;
        lay.pcmcs.push_back(p);
    }

    // Laser feeds the head of the PCMC chain.
    lay.edges.push_back({{PortKind::Laser, -1, -1}, {PortKind::PcmcIn, 0, -1}});
    // Cross of PCMC_k taps into MRG_k; Bar continues down the chain, with the
    // last Bar feeding the final MRG directly.
    for (int k = 0; k < n - 1; ++k) {
        lay.edges.push_back({{PortKind::PcmcCross, k, -1}, mrg_in(k, 0)});
        if (k < n - 2)
            lay.edges.push_back({{PortKind::PcmcBar, k, -1}, {PortKind::PcmcIn, k + 1, -1}});
        else
            lay.edges.push_back({{PortKind::PcmcBar, k, -1}, mrg_in(n - 1, 0)});
    }
    // Waveguides: O_j of MRG_k continues as I_{j+1} of MRG_{k+1}, wrapping
    // from the last MRG back to the first. After a waveguide has passed its
    // N-1 readers it terminates at the O port with the highest index.
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n - 1; ++j)
            lay.edges.push_back({mrg_out(k, j), mrg_in((k + 1) % n, j + 1)});
        lay.edges.push_back({mrg_out(k, n - 1), {PortKind::Terminator, -1, -1}});
    }
    return lay;
}

}  // namespace resipi
