// Experiment runner for the reconfigurable photonic interposer simulator.

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "selection.hpp"
#include "topology.hpp"

using namespace resipi;

int main(int argc, char** argv) {
    CLI::App app{"resipi - cycle-accurate 2.5D photonic interposer simulator"};

    std::string config_path;
    std::string preset = "resipi-dynamic";
    std::string out_dir = "out";
    std::string sweep_path;
    bool dump_selection = false;
    std::map<std::string, std::string> overrides;
    long long cycles = -1, warmup = -1, interval = -1, seed = -1;

    app.add_option("--config", config_path, "config file (key = value lines)")
        ->check(CLI::ExistingFile);
    app.add_option("--preset", preset,
                   "resipi-dynamic | static-all | static-min | wdm-scaling");
    app.add_option("--cycles", cycles, "measured cycles");
    app.add_option("--warmup", warmup, "warm-up cycles (stats excluded)");
    app.add_option("--interval", interval, "reconfiguration interval cycles");
    app.add_option("--seed", seed, "PRNG seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--sweep", sweep_path, "sweep grid file; runs one experiment per point")
        ->check(CLI::ExistingFile);
    app.add_flag("--dump-selection-table", dump_selection,
                 "print the gateway selection tables and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        RunMode mode = parse_mode(preset);
        if (cycles >= 0) overrides["cycles"] = std::to_string(cycles);
        if (warmup >= 0) overrides["warmup_cycles"] = std::to_string(warmup);
        if (interval >= 0) overrides["interval_cycles"] = std::to_string(interval);
        if (seed >= 0) overrides["seed"] = std::to_string(seed);
        SystemConfig config = load_config(config_path, mode, overrides);

        if (dump_selection) {
            Topology topo = build_topology(config);
            std::vector<SelectionTable> tables = build_selection_tables(topo);
            for (int c = 0; c < topo.num_chiplets; ++c) {
                std::cout << "=== chiplet " << c << " ===\n" << tables[c].dump();
            }
            return 0;
        }

        if (!sweep_path.empty()) {
            SweepGrid grid = parse_sweep_grid(sweep_path);
            std::vector<SweepPoint> points = run_sweep(config, grid, true, out_dir);
            std::filesystem::create_directories(out_dir);
            write_file((std::filesystem::path(out_dir) / "sweep.csv").string(),
                       sweep_csv(points));
            std::string sel;
            if (auto lm = select_l_m(points)) {
                std::ostringstream os;
                os << "selected_l_m: " << *lm << "\n";
                sel = os.str();
            } else {
                sel = "selected_l_m: n/a\n";
            }
            write_file((std::filesystem::path(out_dir) / "sweep_summary.txt").string(), sel);
            std::cout << sweep_csv(points) << sel;
            return 0;
        }

        RunResult result = run_experiment(config);
        write_outputs(result, out_dir);
        std::cout << "delivered_packets: " << result.delivered_packets << "\n"
                  << "avg_latency_cycles: "
                  << (result.avg_latency_cycles ? std::to_string(*result.avg_latency_cycles)
                                                : std::string("n/a"))
                  << "\n"
                  << "mean_power_mw: " << result.mean_power.total_mw << "\n"
                  << "total_energy_mj: " << result.total_energy_mj << "\n"
                  << "outputs: " << out_dir << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
