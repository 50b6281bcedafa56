#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "photonics.hpp"
#include "topology.hpp"

namespace resipi {

struct IntervalStats {
    int index = 0;
    uint64_t start_cycle = 0;
    uint64_t end_cycle = 0;
    uint64_t delivered = 0;
    std::optional<double> avg_latency_cycles;  // absent when nothing delivered
    std::vector<int> gateways_per_chiplet;     // at interval end, before the new plan
    int total_active_gateways = 0;
    std::vector<double> load_per_chiplet;      // packets/cycle per active gateway
    std::vector<int> wavelengths_per_gateway;  // per core gateway, at interval end
    PowerBreakdown mean_power;                 // time-averaged over the interval
    double energy_mj = 0.0;                    // power integral + reconfig energy
    int reconfig_events = 0;
    double reconfig_energy_nj = 0.0;
};

struct ReconfigEvent {
    uint64_t cycle = 0;            // retune start
    std::vector<int> g_before;     // per chiplet
    std::vector<int> g_after;
    int gt_before = 0;
    int gt_after = 0;
    int pcmcs_retuned = 0;
    double energy_nj = 0.0;
    std::vector<int> activated;    // gateway ids, live at cycle + window
    std::vector<int> deactivated;  // gateway ids, off at cycle
    uint64_t activation_window = 0;
    bool deferred = false;
};

// Per-router flit residency: accumulated cycles flits spent inside each
// router divided by the flits that passed through it.
struct ResidencyMap {
    int num_chiplets = 0;
    int mesh_rows = 0;
    int mesh_cols = 0;
    std::vector<uint64_t> flit_cycles;  // indexed by core node id
    std::vector<uint64_t> flits;

    void init(int chiplets, int rows, int cols) {
        num_chiplets = chiplets;
        mesh_rows = rows;
        mesh_cols = cols;
        flit_cycles.assign(static_cast<size_t>(chiplets) * rows * cols, 0);
        flits.assign(flit_cycles.size(), 0);
    }
    void record(int node, uint64_t cycles_inside) {
        flit_cycles[node] += cycles_inside;
        ++flits[node];
    }
    std::optional<double> residency(int node) const {
        if (flits[node] == 0) return std::nullopt;
        return static_cast<double>(flit_cycles[node]) / static_cast<double>(flits[node]);
    }
};

// Latency/power/energy accumulators for the measured region of a run.
class MetricsCollector {
public:
    void begin_run(uint64_t start_cycle, const PowerBreakdown& initial_power);

    void record_delivery(uint64_t inject_cycle, uint64_t deliver_cycle);
    // Power is piecewise constant; call on every change with the cycle it
    // takes effect.
    void power_changed(uint64_t cycle, const PowerBreakdown& new_power);
    void add_reconfig_event(const ReconfigEvent& ev);

    IntervalStats finalize_interval(uint64_t end_cycle, const std::vector<int>& g_per_chiplet,
                                    int gt, const std::vector<double>& loads,
                                    const std::vector<int>& gw_wavelengths,
                                    double cycle_time_ns);

    const std::vector<IntervalStats>& intervals() const { return intervals_; }
    const std::vector<ReconfigEvent>& reconfig_events() const { return events_; }

    uint64_t total_delivered() const { return run_delivered_; }
    std::optional<double> run_avg_latency() const;
    double run_energy_mj(double cycle_time_ns) const;
    PowerBreakdown run_mean_power(uint64_t end_cycle) const;
    double total_reconfig_energy_nj() const { return run_reconfig_energy_nj_; }

private:
    struct PowerIntegral {
        double laser = 0, tuning = 0, tia = 0, driver = 0, controller = 0, total = 0;
        void add(const PowerBreakdown& p, double dt) {
            laser += p.laser_mw * dt;
            tuning += p.tuning_mw * dt;
            tia += p.tia_mw * dt;
            driver += p.driver_mw * dt;
            controller += p.controller_mw * dt;
            total += p.total_mw * dt;
        }
    };

    void integrate_to(uint64_t cycle);

    std::vector<IntervalStats> intervals_;
    std::vector<ReconfigEvent> events_;

    PowerBreakdown current_power_;
    uint64_t last_power_cycle_ = 0;
    uint64_t interval_start_ = 0;
    PowerIntegral interval_integral_;
    PowerIntegral run_integral_;

    uint64_t interval_delivered_ = 0;
    double interval_latency_sum_ = 0.0;
    int interval_events_ = 0;
    double interval_reconfig_energy_nj_ = 0.0;

    uint64_t run_delivered_ = 0;
    double run_latency_sum_ = 0.0;
    double run_reconfig_energy_nj_ = 0.0;
    uint64_t run_start_ = 0;
};

// --- export -----------------------------------------------------------------

std::string intervals_csv(const std::vector<IntervalStats>& intervals, int num_chiplets,
                          int core_gateways);
std::string residency_csv(const ResidencyMap& map);
std::string reconfig_log_text(const std::vector<ReconfigEvent>& events);

void write_file(const std::string& path, const std::string& content);

}  // namespace resipi
