#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "engine.hpp"
#include "metrics.hpp"

namespace resipi {

struct RunResult {
    SystemConfig config;
    std::vector<IntervalStats> intervals;
    std::vector<ReconfigEvent> reconfig_events;
    ResidencyMap residency;

    uint64_t delivered_packets = 0;
    std::optional<double> avg_latency_cycles;
    PowerBreakdown mean_power;
    double total_energy_mj = 0.0;
    double reconfig_energy_nj = 0.0;
    int reconfig_event_count = 0;  // executed retunes, deferrals excluded
    double awgr_reference_power_mw = 0.0;

    uint64_t injected_flits = 0;
    uint64_t delivered_flits = 0;
    uint64_t in_flight_flits = 0;
};

// Warm-up (stats suppressed) followed by the measured cycles.
RunResult run_experiment(const SystemConfig& config);

std::string summary_text(const RunResult& r);

// Writes intervals.csv, residency.csv, summary.txt and reconfig_log.txt.
void write_outputs(const RunResult& r, const std::string& out_dir);

// --- sweeps ------------------------------------------------------------------

struct SweepPoint {
    int gateways = 0;       // fixed active gateway count for the point
    double rate = 0.0;
    double l_m = 0.0;       // only for l_m sweeps
    double avg_gateway_load = 0.0;  // mean over chiplets and intervals
    std::optional<double> avg_latency_cycles;
    double mean_power_mw = 0.0;
};

struct SweepGrid {
    std::vector<int> gateways;   // fixed-count sweep
    std::vector<double> rates;
    std::vector<double> l_m;     // dynamic-mode sweep over the load cap
};

SweepGrid parse_sweep_grid(const std::string& path);

// One experiment per grid point, optionally in parallel (one engine per
// worker). With a non-empty out_dir every point writes its own output
// directory (point_NNN/); the caller writes the merged summary.
std::vector<SweepPoint> run_sweep(const SystemConfig& base, const SweepGrid& grid,
                                  bool parallel = true, const std::string& out_dir = "");

// The load-cap selection rule: group points by gateway count, keep points
// within `overhead` of each group's best latency, return the largest gateway
// load among the kept points.
std::optional<double> select_l_m(const std::vector<SweepPoint>& points, double overhead = 1.10);

std::string sweep_csv(const std::vector<SweepPoint>& points);

}  // namespace resipi
