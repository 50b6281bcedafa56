#pragma once

#include <cstdint>
#include <vector>

namespace resipi {

// Per-gateway packet-rate thresholds. The increase threshold is the maximum
// allowable gateway load itself; the decrease threshold for g gateways is the
// load below which g-1 gateways could absorb the traffic without any of them
// exceeding that maximum.
struct Thresholds {
    double l_m = 0.0152;

    double t_p(int) const { return l_m; }
    double t_n(int g) const { return g <= 1 ? 0.0 : (l_m * (g - 1)) / g; }
};

// Average per-gateway packet rate over an interval.
double gateway_load(uint64_t packets_sent, uint64_t interval_len, int active_gateways);

// Threshold step: at most one gateway up or down per interval, strict
// comparisons so boundary loads cause no change.
int update_gateway_count(double load, int g, int g_max, const Thresholds& th);

struct ChipletChange {
    int chiplet = 0;
    int before = 0;
    int after = 0;
};

struct ReconfigurationPlan {
    uint64_t cycle = 0;
    std::vector<ChipletChange> changes;   // only chiplets whose count moves
    std::vector<int> activate;            // global gateway ids, activation order
    std::vector<int> deactivate;          // global gateway ids, reverse order
    int gt_before = 0;                    // total active incl. memory gateways
    int gt_after = 0;
    bool deferred = false;                // previous plan still executing

    bool empty() const { return activate.empty() && deactivate.empty(); }
};

// The distributed controller collapsed to its functional core: one local
// gateway counter per chiplet plus the global view that sums them. Gateways
// activate in fixed order (lowest local index first) and deactivate in
// reverse, so a chiplet's active set is always a prefix.
class ReconfigController {
public:
    ReconfigController(int num_chiplets, int gateways_per_chiplet, int mem_gateways,
                       int initial_gateways, uint64_t interval_cycles, double l_m);

    void count_packet(int chiplet) { ++packets_[chiplet]; }
    void reset_counters();

    // Runs the threshold logic for every chiplet at an interval boundary and
    // emits an ordered plan. With a previous plan still executing all changes
    // defer to the next interval (counters still reset). Commits the new
    // per-chiplet counts immediately; the engine realizes them.
    ReconfigurationPlan end_of_interval(uint64_t now, bool plan_in_flight);

    int active_count(int chiplet) const { return active_[chiplet]; }
    // Rollback hook for aborted plans (drain timeout).
    void set_active(int chiplet, int count) { active_[chiplet] = count; }
    int total_active() const;  // Σ g_c + memory gateways
    uint64_t packets_sent(int chiplet) const { return packets_[chiplet]; }
    std::vector<double> current_loads() const;
    const Thresholds& thresholds() const { return thresholds_; }
    int max_gateways() const { return g_max_; }

private:
    int num_chiplets_;
    int g_max_;
    int mem_gateways_;
    uint64_t interval_cycles_;
    Thresholds thresholds_;
    std::vector<int> active_;
    std::vector<uint64_t> packets_;
};

}  // namespace resipi
