#include "metrics.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace resipi {

void MetricsCollector::begin_run(uint64_t start_cycle, const PowerBreakdown& initial_power) {
    current_power_ = initial_power;
    last_power_cycle_ = start_cycle;
    interval_start_ = start_cycle;
    run_start_ = start_cycle;
}

void MetricsCollector::integrate_to(uint64_t cycle) {
    if (cycle <= last_power_cycle_) return;
    double dt = static_cast<double>(cycle - last_power_cycle_);
    interval_integral_.add(current_power_, dt);
    run_integral_.add(current_power_, dt);
    last_power_cycle_ = cycle;
}

void MetricsCollector::power_changed(uint64_t cycle, const PowerBreakdown& new_power) {
    integrate_to(cycle);
    current_power_ = new_power;
}

void MetricsCollector::record_delivery(uint64_t inject_cycle, uint64_t deliver_cycle) {
    double latency = static_cast<double>(deliver_cycle - inject_cycle);
    ++interval_delivered_;
    interval_latency_sum_ += latency;
    ++run_delivered_;
    run_latency_sum_ += latency;
}

void MetricsCollector::add_reconfig_event(const ReconfigEvent& ev) {
    events_.push_back(ev);
    if (!ev.deferred) {
        ++interval_events_;
        interval_reconfig_energy_nj_ += ev.energy_nj;
        run_reconfig_energy_nj_ += ev.energy_nj;
    }
}

IntervalStats MetricsCollector::finalize_interval(uint64_t end_cycle,
                                                  const std::vector<int>& g_per_chiplet, int gt,
                                                  const std::vector<double>& loads,
                                                  const std::vector<int>& gw_wavelengths,
                                                  double cycle_time_ns) {
    integrate_to(end_cycle);
    IntervalStats s;
    s.index = static_cast<int>(intervals_.size());
    s.start_cycle = interval_start_;
    s.end_cycle = end_cycle;
    s.delivered = interval_delivered_;
    if (interval_delivered_ > 0)
        s.avg_latency_cycles = interval_latency_sum_ / static_cast<double>(interval_delivered_);
    s.gateways_per_chiplet = g_per_chiplet;
    s.total_active_gateways = gt;
    s.load_per_chiplet = loads;
    s.wavelengths_per_gateway = gw_wavelengths;

    double dt = static_cast<double>(end_cycle - interval_start_);
    if (dt > 0) {
        s.mean_power.laser_mw = interval_integral_.laser / dt;
        s.mean_power.tuning_mw = interval_integral_.tuning / dt;
        s.mean_power.tia_mw = interval_integral_.tia / dt;
        s.mean_power.driver_mw = interval_integral_.driver / dt;
        s.mean_power.controller_mw = interval_integral_.controller / dt;
        s.mean_power.total_mw = interval_integral_.total / dt;
    }
    // mW * cycle * ns/cycle = pJ; 1 mJ = 1e9 pJ. Reconfig energy adds in nJ.
    s.energy_mj = interval_integral_.total * cycle_time_ns * 1e-9 +
                  interval_reconfig_energy_nj_ * 1e-6;
    s.reconfig_events = interval_events_;
    s.reconfig_energy_nj = interval_reconfig_energy_nj_;

    intervals_.push_back(s);
    interval_start_ = end_cycle;
    interval_integral_ = PowerIntegral{};
    interval_delivered_ = 0;
    interval_latency_sum_ = 0.0;
    interval_events_ = 0;
    interval_reconfig_energy_nj_ = 0.0;
    return s;
}

std::optional<double> MetricsCollector::run_avg_latency() const {
    if (run_delivered_ == 0) return std::nullopt;
    return run_latency_sum_ / static_cast<double>(run_delivered_);
}

double MetricsCollector::run_energy_mj(double cycle_time_ns) const {
    return run_integral_.total * cycle_time_ns * 1e-9 + run_reconfig_energy_nj_ * 1e-6;
}

PowerBreakdown MetricsCollector::run_mean_power(uint64_t end_cycle) const {
    PowerBreakdown p;
    double dt = static_cast<double>(end_cycle - run_start_);
    if (dt <= 0) return p;
    p.laser_mw = run_integral_.laser / dt;
    p.tuning_mw = run_integral_.tuning / dt;
    p.tia_mw = run_integral_.tia / dt;
    p.driver_mw = run_integral_.driver / dt;
    p.controller_mw = run_integral_.controller / dt;
    p.total_mw = run_integral_.total / dt;
    return p;
}

namespace {

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
}

}  // namespace

std::string intervals_csv(const std::vector<IntervalStats>& intervals, int num_chiplets,
                          int core_gateways) {
    std::ostringstream os;
    os << "interval,start_cycle,end_cycle,delivered,avg_latency_cycles";
    for (int c = 0; c < num_chiplets; ++c) os << ",g_chiplet" << c;
    os << ",gt";
    for (int c = 0; c < num_chiplets; ++c) os << ",load_chiplet" << c;
    for (int g = 0; g < core_gateways; ++g) os << ",wavelengths_gw" << g;
    os << ",laser_mw,tuning_mw,tia_mw,driver_mw,controller_mw,total_mw"
       << ",reconfig_events,reconfig_energy_nj,energy_mj\n";
    for (const auto& s : intervals) {
        os << s.index << "," << s.start_cycle << "," << s.end_cycle << "," << s.delivered << ",";
        if (s.avg_latency_cycles) os << fmt(*s.avg_latency_cycles);
        for (int c = 0; c < num_chiplets; ++c) os << "," << s.gateways_per_chiplet[c];
        os << "," << s.total_active_gateways;
        for (int c = 0; c < num_chiplets; ++c) os << "," << fmt(s.load_per_chiplet[c], 8);
        for (int g = 0; g < core_gateways; ++g) os << "," << s.wavelengths_per_gateway[g];
        os << "," << fmt(s.mean_power.laser_mw) << "," << fmt(s.mean_power.tuning_mw) << ","
           << fmt(s.mean_power.tia_mw) << "," << fmt(s.mean_power.driver_mw) << ","
           << fmt(s.mean_power.controller_mw) << "," << fmt(s.mean_power.total_mw) << ","
           << s.reconfig_events << "," << fmt(s.reconfig_energy_nj, 3) << ","
           << fmt(s.energy_mj, 9) << "\n";
    }
    return os.str();
}

std::string residency_csv(const ResidencyMap& map) {
    std::ostringstream os;
    os << "chiplet,row,col,flits,flit_cycles,residency_cycles\n";
    int rpc = map.mesh_rows * map.mesh_cols;
    for (size_t node = 0; node < map.flits.size(); ++node) {
        int chiplet = static_cast<int>(node) / rpc;
        int r = (static_cast<int>(node) % rpc) / map.mesh_cols;
        int c = static_cast<int>(node) % map.mesh_cols;
        os << chiplet << "," << r << "," << c << "," << map.flits[node] << ","
           << map.flit_cycles[node] << ",";
        // No traffic means no residency value, not zero.
        if (auto res = map.residency(static_cast<int>(node))) os << fmt(*res);
        os << "\n";
    }
    return os.str();
}

std::string reconfig_log_text(const std::vector<ReconfigEvent>& events) {
    std::ostringstream os;
    for (const auto& ev : events) {
        os << "cycle " << ev.cycle;
        if (ev.deferred) {
            os << " deferred (previous plan in flight)\n";
            continue;
        }
        os << " g:[";
        for (size_t c = 0; c < ev.g_before.size(); ++c)
            os << (c ? " " : "") << ev.g_before[c] << "->" << ev.g_after[c];
        os << "] gt:" << ev.gt_before << "->" << ev.gt_after
           << " pcmcs_retuned:" << ev.pcmcs_retuned << " energy_nj:" << fmt(ev.energy_nj, 3);
        if (!ev.activated.empty()) {
            os << " activate:[";
            for (size_t i = 0; i < ev.activated.size(); ++i)
                os << (i ? " " : "") << ev.activated[i];
            os << "] live_at:" << ev.cycle + ev.activation_window;
        }
        if (!ev.deactivated.empty()) {
            os << " deactivate:[";
            for (size_t i = 0; i < ev.deactivated.size(); ++i)
                os << (i ? " " : "") << ev.deactivated[i];
            os << "] off_at:" << ev.cycle;
        }
        os << "\n";
    }
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace resipi
