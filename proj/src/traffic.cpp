#include "traffic.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "prng.hpp"

namespace resipi {

namespace {

// RNG stream ids per (cycle, node) draw
constexpr uint64_t kStreamBernoulli = 0;
constexpr uint64_t kStreamDest = 1;
constexpr uint64_t kStreamMem = 2;
constexpr uint64_t kStreamMemPick = 3;
constexpr uint64_t kStreamHotspot = 4;

}  // namespace

std::vector<TraceRecord> parse_trace(const std::string& text, int node_count) {
    std::vector<TraceRecord> records;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    uint64_t last_cycle = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        TraceRecord r;
        long long cyc, src, dst, bits;
        if (!(ls >> cyc)) continue;  // blank line
        if (!(ls >> src >> dst >> bits))
            throw ConfigError("trace: malformed record (want `cycle src dst bits`)", lineno);
        std::string extra;
        if (ls >> extra) throw ConfigError("trace: trailing junk: " + extra, lineno);
        if (cyc < 0 || bits <= 0)
            throw ConfigError("trace: cycle must be >= 0 and bits > 0", lineno);
        if (src < 0 || src >= node_count || dst < 0 || dst >= node_count)
            throw ConfigError("trace: node id out of range [0, " +
                                  std::to_string(node_count) + ")",
                              lineno);
        r.inject_cycle = static_cast<uint64_t>(cyc);
        r.src_node = static_cast<int>(src);
        r.dst_node = static_cast<int>(dst);
        r.payload_bits = static_cast<int>(bits);
        if (!records.empty() && r.inject_cycle < last_cycle)
            throw ConfigError("trace: records must be sorted by cycle", lineno);
        last_cycle = r.inject_cycle;
        records.push_back(r);
    }
    return records;
}

std::vector<TraceRecord> load_trace(const std::string& path, int node_count) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trace(ss.str(), node_count);
}

TrafficSpec phased_workload(const std::vector<TrafficPhase>& phases) {
    if (phases.empty()) throw std::invalid_argument("phased workload needs at least one phase");
    for (const auto& p : phases)
        if (p.duration_cycles == 0)
            throw std::invalid_argument("phased workload: zero-duration phase");
    TrafficSpec spec;
    spec.pattern = TrafficPattern::Phased;
    spec.phases = phases;
    return spec;
}

TrafficGenerator::TrafficGenerator(const TrafficSpec& spec, const Topology& topo, uint64_t seed,
                                   int packet_bits)
    : spec_(spec), topo_(topo), seed_(seed), packet_bits_(packet_bits) {
    for (int t : spec_.hotspot_targets)
        if (t < 0 || t >= topo.total_node_count())
            throw ConfigError("hotspot target " + std::to_string(t) + " outside the topology");
    if (spec_.pattern == TrafficPattern::Trace)
        trace_ = load_trace(spec_.trace_path, topo.total_node_count());
    if (spec_.pattern == TrafficPattern::Phased) {
        uint64_t at = 0;
        for (const auto& p : spec_.phases) {
            phase_starts_.push_back(at);
            at += p.duration_cycles;
        }
    }
}

int TrafficGenerator::transpose_of(int node, int node_count) {
    int bits = std::bit_width(static_cast<unsigned>(node_count)) - 1;
    if ((1 << bits) != node_count || bits % 2 != 0)
        throw std::invalid_argument(
            "transpose pattern needs a power-of-4 core node count, got " +
            std::to_string(node_count));
    int half = bits / 2;
    int lo = node & ((1 << half) - 1);
    int hi = node >> half;
    return (lo << half) | hi;
}

const TrafficPhase* TrafficGenerator::phase_at(uint64_t cycle) const {
    for (size_t i = phase_starts_.size(); i-- > 0;)
        if (cycle >= phase_starts_[i]) return &spec_.phases[i];
    return nullptr;
}

int TrafficGenerator::draw_destination(TrafficPattern pattern, int src, uint64_t cycle) {
    int cores = topo_.core_node_count();
    // A configured slice of the offered load goes to the memory endpoints.
    if (spec_.mem_fraction > 0.0 && topo_.mem_gateway_count > 0 &&
        draw_unit(seed_, cycle, src, kStreamMem) < spec_.mem_fraction) {
        int m = static_cast<int>(
            draw_below(seed_, cycle, src, kStreamMemPick, topo_.mem_gateway_count));
        return cores + m;
    }
    switch (pattern) {
        case TrafficPattern::Uniform: {
            int dst = static_cast<int>(draw_below(seed_, cycle, src, kStreamDest, cores - 1));
            return dst >= src ? dst + 1 : dst;  // uniform over all cores but self
        }
        case TrafficPattern::Transpose:
            return transpose_of(src, cores);
        case TrafficPattern::Hotspot: {
            const auto& targets = spec_.hotspot_targets;
            if (spec_.hotspot_weights.empty())
                return targets[draw_below(seed_, cycle, src, kStreamHotspot, targets.size())];
            double total = 0.0;
            for (double w : spec_.hotspot_weights) total += w;
            double u = draw_unit(seed_, cycle, src, kStreamHotspot) * total;
            for (size_t i = 0; i < targets.size(); ++i) {
                u -= spec_.hotspot_weights[i];
                if (u < 0.0) return targets[i];
            }
            return targets.back();
        }
        default:
            throw std::logic_error("pattern has no destination rule");
    }
}

void TrafficGenerator::generate_synthetic(TrafficPattern pattern, double rate, uint64_t cycle,
                                          std::vector<Injection>& out) {
    if (rate <= 0.0) return;
    int cores = topo_.core_node_count();
    for (int src = 0; src < cores; ++src) {
        bool fire;
        if (spec_.process == InjectionProcess::Bernoulli) {
            fire = draw_unit(seed_, cycle, src, kStreamBernoulli) < rate;
        } else {
            // Metronome injection: fire when floor((c+1+phase)*rate) steps.
            // Per-node phases stagger the injectors across the period.
            uint64_t phase = mix64(seed_ ^ (static_cast<uint64_t>(src) * 0x9e3779b97f4a7c15ULL)) %
                             1000000ULL;
            double c = static_cast<double>(cycle + phase);
            fire = static_cast<uint64_t>((c + 1.0) * rate) > static_cast<uint64_t>(c * rate);
        }
        if (!fire) continue;
        int dst = draw_destination(pattern, src, cycle);
        if (dst == src) continue;  // transpose fixed points generate nothing
        out.push_back({src, dst, packet_bits_});
    }
}

std::vector<Injection> TrafficGenerator::next_injections(uint64_t cycle) {
    std::vector<Injection> out;
    switch (spec_.pattern) {
        case TrafficPattern::Trace:
            while (trace_pos_ < trace_.size() && trace_[trace_pos_].inject_cycle == cycle) {
                const TraceRecord& r = trace_[trace_pos_++];
                if (r.src_node != r.dst_node) out.push_back({r.src_node, r.dst_node, r.payload_bits});
            }
            break;
        case TrafficPattern::Phased: {
            const TrafficPhase* ph = phase_at(cycle);
            if (ph) generate_synthetic(ph->pattern, ph->rate, cycle, out);
            break;
        }
        default:
            generate_synthetic(spec_.pattern, spec_.rate, cycle, out);
            break;
    }
    return out;
}

}  // namespace resipi
