#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "topology.hpp"

namespace resipi {

struct Injection {
    int src_node = 0;
    int dst_node = 0;
    int payload_bits = 0;
};

struct TraceRecord {
    uint64_t inject_cycle = 0;
    int src_node = 0;
    int dst_node = 0;
    int payload_bits = 0;
};

// Parses a `cycle src dst bits` text trace ('#' comments). Validates sorting
// and id ranges against the node count; errors carry the offending line.
std::vector<TraceRecord> load_trace(const std::string& path, int node_count);
std::vector<TraceRecord> parse_trace(const std::string& text, int node_count);

// Builds a phased spec from (pattern, rate, duration) triples.
TrafficSpec phased_workload(const std::vector<TrafficPhase>& phases);

// Offered-load generator. Synthetic patterns draw per (seed, cycle, node)
// with a counter-based PRNG, so the sequence is a pure function of the
// TrafficSpec and seed. Core nodes inject; memory endpoints only source traffic in trace
// mode.
class TrafficGenerator {
public:
    TrafficGenerator(const TrafficSpec& spec, const Topology& topo, uint64_t seed,
                     int packet_bits);

    // All packets injected at `cycle`, in ascending src order.
    std::vector<Injection> next_injections(uint64_t cycle);

    // Fixed transpose mapping (swap the high/low halves of the node id bits).
    static int transpose_of(int node, int node_count);

private:
    const TrafficSpec spec_;
    const Topology& topo_;
    uint64_t seed_;
    int packet_bits_;
    std::vector<TraceRecord> trace_;
    size_t trace_pos_ = 0;
    std::vector<uint64_t> phase_starts_;

    const TrafficPhase* phase_at(uint64_t cycle) const;
    int draw_destination(TrafficPattern pattern, int src, uint64_t cycle);
    void generate_synthetic(TrafficPattern pattern, double rate, uint64_t cycle,
                            std::vector<Injection>& out);
};

}  // namespace resipi
