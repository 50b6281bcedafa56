#include "experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "topology.hpp"

namespace resipi {

RunResult run_experiment(const SystemConfig& config) {
    config.validate();
    Topology topo = build_topology(config);
    Engine engine(config, topo);
    engine.run(config.warmup_cycles + config.cycles);
    engine.finish_run();

    RunResult r;
    r.config = config;
    r.intervals = engine.metrics().intervals();
    r.reconfig_events = engine.metrics().reconfig_events();
    r.residency = engine.residency();
    r.delivered_packets = engine.metrics().total_delivered();
    r.avg_latency_cycles = engine.metrics().run_avg_latency();
    r.mean_power = engine.metrics().run_mean_power(engine.now());
    r.total_energy_mj = engine.metrics().run_energy_mj(1.0 / config.noc_freq_ghz);
    r.reconfig_energy_nj = engine.metrics().total_reconfig_energy_nj();
    for (const auto& ev : r.reconfig_events)
        if (!ev.deferred) ++r.reconfig_event_count;
    r.awgr_reference_power_mw = awgr_static_power_mw(topo.total_gateways(), config.power);
    r.injected_flits = engine.injected_flits();
    r.delivered_flits = engine.delivered_flits();
    r.in_flight_flits = engine.in_flight_flits();
    return r;
}

namespace {

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
}

}  // namespace

std::string summary_text(const RunResult& r) {
    std::ostringstream os;
    os << "mode: " << mode_name(r.config.mode) << "\n";
    os << "measured_cycles: " << r.config.cycles << "\n";
    os << "warmup_cycles: " << r.config.warmup_cycles << "\n";
    os << "seed: " << r.config.seed << "\n";
    os << "delivered_packets: " << r.delivered_packets << "\n";
    os << "avg_latency_cycles: "
       << (r.avg_latency_cycles ? fmt(*r.avg_latency_cycles) : std::string("n/a")) << "\n";
    os << "mean_power_mw: " << fmt(r.mean_power.total_mw) << "\n";
    os << "mean_laser_mw: " << fmt(r.mean_power.laser_mw) << "\n";
    os << "mean_tuning_mw: " << fmt(r.mean_power.tuning_mw) << "\n";
    os << "mean_tia_mw: " << fmt(r.mean_power.tia_mw) << "\n";
    os << "mean_driver_mw: " << fmt(r.mean_power.driver_mw) << "\n";
    os << "mean_controller_mw: " << fmt(r.mean_power.controller_mw) << "\n";
    os << "total_energy_mj: " << fmt(r.total_energy_mj, 9) << "\n";
    os << "reconfig_events: " << r.reconfig_event_count << "\n";
    os << "reconfig_energy_nj: " << fmt(r.reconfig_energy_nj, 3) << "\n";
    os << "awgr_reference_power_mw: " << fmt(r.awgr_reference_power_mw) << "\n";
    os << "injected_flits: " << r.injected_flits << "\n";
    os << "delivered_flits: " << r.delivered_flits << "\n";
    os << "in_flight_flits_at_end: " << r.in_flight_flits << "\n";
    os << "# config echo\n";
    for (const auto& [k, v] : r.config.to_kv()) os << "config." << k << " = " << v << "\n";
    return os.str();
}

void write_outputs(const RunResult& r, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);
    int core_gw = r.config.num_chiplets * r.config.max_gateways_per_chiplet;
    write_file((dir / "intervals.csv").string(),
               intervals_csv(r.intervals, r.config.num_chiplets, core_gw));
    write_file((dir / "residency.csv").string(), residency_csv(r.residency));
    write_file((dir / "summary.txt").string(), summary_text(r));
    write_file((dir / "reconfig_log.txt").string(), reconfig_log_text(r.reconfig_events));
}

SweepGrid parse_sweep_grid(const std::string& path) {
    KeyValueConfig kv = KeyValueConfig::parse_file(path);
    SweepGrid grid;
    std::istringstream gs(kv.get_str("gateways", ""));
    for (int g; gs >> g;) grid.gateways.push_back(g);
    std::istringstream rs(kv.get_str("rates", ""));
    for (double r; rs >> r;) grid.rates.push_back(r);
    std::istringstream ls(kv.get_str("l_m", ""));
    for (double l; ls >> l;) grid.l_m.push_back(l);
    auto unread = kv.unread_keys();
    if (!unread.empty()) throw ConfigError("sweep grid: unknown key " + unread.front());
    if (grid.gateways.empty() && grid.l_m.empty())
        throw ConfigError("sweep grid: need `gateways = ...` or `l_m = ...`");
    if (grid.rates.empty()) throw ConfigError("sweep grid: need `rates = ...`");
    return grid;
}

namespace {

SweepPoint run_point(SystemConfig cfg, int gateways, double rate, double l_m,
                     const std::string& point_dir) {
    cfg.traffic.rate = rate;
    if (gateways > 0) {
        cfg.dynamic_gateways = false;
        cfg.initial_gateways = gateways;
    }
    if (l_m > 0) cfg.l_m = l_m;
    RunResult r = run_experiment(cfg);
    if (!point_dir.empty()) write_outputs(r, point_dir);

    SweepPoint p;
    p.gateways = gateways > 0 ? gateways : -1;
    p.rate = rate;
    p.l_m = l_m;
    p.avg_latency_cycles = r.avg_latency_cycles;
    p.mean_power_mw = r.mean_power.total_mw;
    double load_sum = 0.0;
    size_t n = 0;
    for (const auto& iv : r.intervals)
        for (double l : iv.load_per_chiplet) {
            load_sum += l;
            ++n;
        }
    p.avg_gateway_load = n ? load_sum / static_cast<double>(n) : 0.0;
    return p;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const SystemConfig& base, const SweepGrid& grid,
                                  bool parallel, const std::string& out_dir) {
    struct Job {
        int gateways;
        double rate;
        double l_m;
        std::string dir;
    };
    std::vector<Job> jobs;
    if (!grid.gateways.empty()) {
        for (int g : grid.gateways)
            for (double r : grid.rates) jobs.push_back({g, r, 0.0, ""});
    } else {
        for (double l : grid.l_m)
            for (double r : grid.rates) jobs.push_back({0, r, l, ""});
    }
    if (!out_dir.empty()) {
        char name[32];
        for (size_t i = 0; i < jobs.size(); ++i) {
            std::snprintf(name, sizeof name, "point_%03zu", i);
            jobs[i].dir = (std::filesystem::path(out_dir) / name).string();
        }
    }
    std::vector<SweepPoint> points(jobs.size());
    if (parallel && jobs.size() > 1) {
        std::vector<std::future<SweepPoint>> futs;
        for (const Job& j : jobs)
            futs.push_back(std::async(std::launch::async, [&base, j] {
                return run_point(base, j.gateways, j.rate, j.l_m, j.dir);
            }));
        for (size_t i = 0; i < futs.size(); ++i) points[i] = futs[i].get();
    } else {
        for (size_t i = 0; i < jobs.size(); ++i)
            points[i] = run_point(base, jobs[i].gateways, jobs[i].rate, jobs[i].l_m, jobs[i].dir);
    }
    return points;
}

std::optional<double> select_l_m(const std::vector<SweepPoint>& points, double overhead) {
    std::map<int, double> best_latency;
    for (const auto& p : points) {
        if (!p.avg_latency_cycles) continue;
        auto it = best_latency.find(p.gateways);
        if (it == best_latency.end() || *p.avg_latency_cycles < it->second)
            best_latency[p.gateways] = *p.avg_latency_cycles;
    }
    std::optional<double> chosen;
    for (const auto& p : points) {
        if (!p.avg_latency_cycles) continue;
        if (*p.avg_latency_cycles <= overhead * best_latency[p.gateways]) {
            if (!chosen || p.avg_gateway_load > *chosen) chosen = p.avg_gateway_load;
        }
    }
    return chosen;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream os;
    os << "gateways,rate,l_m,avg_gateway_load,avg_latency_cycles,mean_power_mw\n";
    for (const auto& p : points) {
        os << p.gateways << "," << fmt(p.rate, 8) << "," << fmt(p.l_m, 8) << ","
           << fmt(p.avg_gateway_load, 8) << ",";
        if (p.avg_latency_cycles) os << fmt(*p.avg_latency_cycles);
        os << "," << fmt(p.mean_power_mw) << "\n";
    }
    return os.str();
}

}  // namespace resipi
