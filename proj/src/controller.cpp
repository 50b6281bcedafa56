#include "controller.hpp"

#include <stdexcept>

namespace resipi {

double gateway_load(uint64_t packets_sent, uint64_t interval_len, int active_gateways) {
    if (active_gateways < 1) throw std::invalid_argument("gateway load needs g >= 1");
    if (interval_len == 0) throw std::invalid_argument("gateway load needs a non-empty interval");
    return static_cast<double>(packets_sent) /
           (static_cast<double>(interval_len) * static_cast<double>(active_gateways));
}

int update_gateway_count(double load, int g, int g_max, const Thresholds& th) {
    if (g < 1 || g > g_max) throw std::invalid_argument("gateway count out of range");
    if (load > th.t_p(g) && g < g_max) return g + 1;
    if (load < th.t_n(g) && g > 1) return g - 1;
    return g;
}

ReconfigController::ReconfigController(int num_chiplets, int gateways_per_chiplet,
                                       int mem_gateways, int initial_gateways,
                                       uint64_t interval_cycles, double l_m)
    : num_chiplets_(num_chiplets),
      g_max_(gateways_per_chiplet),
      mem_gateways_(mem_gateways),
      interval_cycles_(interval_cycles),
      active_(num_chiplets, initial_gateways),
      packets_(num_chiplets, 0) {
    if (initial_gateways < 1 || initial_gateways > gateways_per_chiplet)
        throw std::invalid_argument("initial gateway count out of range");
    thresholds_.l_m = l_m;
}

void ReconfigController::reset_counters() {
    for (auto& p : packets_) p = 0;
}

int ReconfigController::total_active() const {
    int gt = mem_gateways_;
    for (int g : active_) gt += g;
    return gt;
}

std::vector<double> ReconfigController::current_loads() const {
    std::vector<double> loads(num_chiplets_);
    for (int c = 0; c < num_chiplets_; ++c)
        loads[c] = gateway_load(packets_[c], interval_cycles_, active_[c]);
    return loads;
}

ReconfigurationPlan ReconfigController::end_of_interval(uint64_t now, bool plan_in_flight) {
    ReconfigurationPlan plan;
    plan.cycle = now;
    plan.gt_before = total_active();

    if (plan_in_flight) {
        plan.deferred = true;
        plan.gt_after = plan.gt_before;
        reset_counters();
        return plan;
    }

    for (int c = 0; c < num_chiplets_; ++c) {
        double load = gateway_load(packets_[c], interval_cycles_, active_[c]);
        int next = update_gateway_count(load, active_[c], g_max_, thresholds_);
        if (next != active_[c]) {
            plan.changes.push_back({c, active_[c], next});
            if (next > active_[c]) {
                for (int i = active_[c]; i < next; ++i)
                    plan.activate.push_back(c * g_max_ + i);
            } else {
                for (int i = active_[c] - 1; i >= next; --i)
                    plan.deactivate.push_back(c * g_max_ + i);
            }
            active_[c] = next;
        }
    }
    plan.gt_after = total_active();
    reset_counters();
    return plan;
}

}  // namespace resipi
