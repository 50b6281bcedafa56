#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace resipi {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

// Flat `key = value` store with '#' comments. Later assignments win, which is
// how presets and command-line overrides stack on top of a base file.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

    std::string get_str(const std::string& key, const std::string& fallback) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }
    // Keys never read through a getter; used to reject unknown/misspelled keys.
    std::vector<std::string> unread_keys() const;

private:
    std::map<std::string, std::string> entries_;
    std::map<std::string, int> lines_;
    mutable std::map<std::string, bool> read_;

    int line_of(const std::string& key) const;
};

struct PowerModel {
    double laser_mw_per_wavelength_per_waveguide = 30.0;
    double tia_mw = 2.0;
    double tuning_mw_per_mr = 3.0;
    double driver_mw = 3.0;
    double controller_uw = 959.0;
    double pcm_reconfig_nj = 2.0;
    double laser_wall_plug_efficiency = 1.0;

    double controller_mw() const { return controller_uw / 1000.0; }
};

enum class TrafficPattern { Uniform, Transpose, Hotspot, Phased, Trace };
enum class InjectionProcess { Bernoulli, Periodic };

struct TrafficPhase {
    TrafficPattern pattern = TrafficPattern::Uniform;
    double rate = 0.0;
    uint64_t duration_cycles = 0;
};

struct TrafficSpec {
    TrafficPattern pattern = TrafficPattern::Uniform;
    InjectionProcess process = InjectionProcess::Bernoulli;
    double rate = 0.001;                  // packets per node per cycle
    double mem_fraction = 0.0;            // fraction of packets aimed at memory endpoints
    std::vector<int> hotspot_targets;
    std::vector<double> hotspot_weights;
    std::vector<TrafficPhase> phases;
    std::string trace_path;
};

struct GatewayPlacement {
    int chiplet = 0;
    int index = 0;
    int row = 0;
    int col = 0;
};

enum class RunMode { ResipiDynamic, StaticAll, StaticMin, WdmScaling };

RunMode parse_mode(const std::string& name);
std::string mode_name(RunMode mode);

// Override keys each preset applies on top of the base config. Presets differ
// from the base in exactly these keys and nothing else.
std::map<std::string, std::string> preset_overrides(RunMode mode);

struct SystemConfig {
    int num_chiplets = 4;
    int mesh_rows = 4;
    int mesh_cols = 4;
    int max_gateways_per_chiplet = 4;     // G
    int mem_gateways = 2;
    int wavelengths = 4;                  // W
    double datarate_gbps = 12.0;          // per wavelength
    double noc_freq_ghz = 1.0;
    uint64_t interval_cycles = 100000;
    double l_m = 0.0152;                  // max allowable gateway load, packets/cycle
    int packet_flits = 8;
    int flit_bits = 32;
    int buffer_flits = 4;                 // per router input port
    int gw_buffer_flits = 8;              // per gateway port
    int optical_prop_cycles = 1;
    int initial_gateways = -1;            // -1 -> start at G
    bool dynamic_gateways = true;
    uint64_t drain_timeout_cycles = 10000;
    uint64_t seed = 1;
    uint64_t cycles = 1000000;
    uint64_t warmup_cycles = 10000;
    RunMode mode = RunMode::ResipiDynamic;

    // wdm-scaling baseline knobs
    int wdm_min_wavelengths = 1;
    int wdm_initial_wavelengths = -1;     // -1 -> wavelengths (start at max)
    int wdm_mem_wavelengths = 4;          // memory gateways keep a fixed width
    double wdm_per_wavelength_lmax = -1;  // -1 -> l_m / 4

    PowerModel power;
    TrafficSpec traffic;
    std::vector<GatewayPlacement> explicit_placements;

    static SystemConfig from_kv(const KeyValueConfig& kv);
    // Canonical flat echo of every field; used for preset diffing and the
    // config echo in run summaries.
    std::map<std::string, std::string> to_kv() const;
    void validate() const;  // throws ConfigError

    int packet_bits() const { return packet_flits * flit_bits; }
    int routers_per_chiplet() const { return mesh_rows * mesh_cols; }
    int total_gateways() const { return num_chiplets * max_gateways_per_chiplet + mem_gateways; }
    uint64_t pcmc_reconfig_cycles() const;  // ceil(100 ns * f_clk)
    int effective_initial_gateways() const {
        return initial_gateways < 0 ? max_gateways_per_chiplet : initial_gateways;
    }
    double per_wavelength_lmax() const {
        return wdm_per_wavelength_lmax < 0 ? l_m / 4.0 : wdm_per_wavelength_lmax;
    }
};

SystemConfig load_config(const std::string& path, RunMode preset,
                         const std::map<std::string, std::string>& cli_overrides);

}  // namespace resipi
