#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace resipi {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    KeyValueConfig kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected `key = value`, got `" + line + "`", lineno);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno);
        kv.entries_[key] = value;
        kv.lines_[key] = lineno;
    }
    return kv;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

int KeyValueConfig::line_of(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
}

std::string KeyValueConfig::get_str(const std::string& key, const std::string& fallback) const {
    read_[key] = true;
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

int64_t KeyValueConfig::get_int(const std::string& key, int64_t fallback) const {
    read_[key] = true;
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        size_t pos = 0;
        int64_t v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key `" + key + "`: not an integer: " + it->second, line_of(key));
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    read_[key] = true;
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key `" + key + "`: not a number: " + it->second, line_of(key));
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    read_[key] = true;
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError("key `" + key + "`: not a boolean: " + it->second, line_of(key));
}

std::vector<std::string> KeyValueConfig::unread_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (!read_.count(k) || !read_.at(k)) out.push_back(k);
    return out;
}

RunMode parse_mode(const std::string& name) {
    if (name == "resipi-dynamic") return RunMode::ResipiDynamic;
    if (name == "static-all") return RunMode::StaticAll;
    if (name == "static-min") return RunMode::StaticMin;
    if (name == "wdm-scaling") return RunMode::WdmScaling;
    throw ConfigError("unknown mode: " + name +
                      " (expected resipi-dynamic, static-all, static-min, wdm-scaling)");
}

std::string mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::ResipiDynamic: return "resipi-dynamic";
        case RunMode::StaticAll: return "static-all";
        case RunMode::StaticMin: return "static-min";
        case RunMode::WdmScaling: return "wdm-scaling";
    }
    return "?";
}

std::map<std::string, std::string> preset_overrides(RunMode mode) {
    std::map<std::string, std::string> o;
    o["mode"] = mode_name(mode);
    switch (mode) {
        case RunMode::ResipiDynamic:
            break;
        case RunMode::StaticAll:
            o["dynamic_gateways"] = "false";
            break;
        case RunMode::StaticMin:
            o["dynamic_gateways"] = "false";
            o["initial_gateways"] = "1";
            break;
        case RunMode::WdmScaling:
            // Bandwidth-matched wavelength-scaling baseline: one wide gateway
            // per chiplet, 4x gateway buffers, core gateways scale 1..16
            // wavelengths, memory gateways keep the base width of 4.
            o["max_gateways_per_chiplet"] = "1";
            o["wavelengths"] = "16";
            o["gw_buffer_flits"] = "32";
            o["wdm_mem_wavelengths"] = "4";
            break;
    }
    return o;
}

namespace {

TrafficPattern parse_pattern(const std::string& s, const KeyValueConfig&) {
    if (s == "uniform") return TrafficPattern::Uniform;
    if (s == "transpose") return TrafficPattern::Transpose;
    if (s == "hotspot") return TrafficPattern::Hotspot;
    if (s == "phased") return TrafficPattern::Phased;
    if (s == "trace") return TrafficPattern::Trace;
    throw ConfigError("unknown traffic pattern: " + s);
}

std::string pattern_name(TrafficPattern p) {
    switch (p) {
        case TrafficPattern::Uniform: return "uniform";
        case TrafficPattern::Transpose: return "transpose";
        case TrafficPattern::Hotspot: return "hotspot";
        case TrafficPattern::Phased: return "phased";
        case TrafficPattern::Trace: return "trace";
    }
    return "?";
}

std::string fmt_double(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

}  // namespace

SystemConfig SystemConfig::from_kv(const KeyValueConfig& kv) {
    SystemConfig c;
    c.num_chiplets = static_cast<int>(kv.get_int("num_chiplets", c.num_chiplets));
    c.mesh_rows = static_cast<int>(kv.get_int("mesh_rows", c.mesh_rows));
    c.mesh_cols = static_cast<int>(kv.get_int("mesh_cols", c.mesh_cols));
    c.max_gateways_per_chiplet =
        static_cast<int>(kv.get_int("max_gateways_per_chiplet", c.max_gateways_per_chiplet));
    c.mem_gateways = static_cast<int>(kv.get_int("mem_gateways", c.mem_gateways));
    c.wavelengths = static_cast<int>(kv.get_int("wavelengths", c.wavelengths));
    c.datarate_gbps = kv.get_double("datarate_gbps", c.datarate_gbps);
    c.noc_freq_ghz = kv.get_double("noc_freq_ghz", c.noc_freq_ghz);
    c.interval_cycles = static_cast<uint64_t>(kv.get_int("interval_cycles", c.interval_cycles));
    c.l_m = kv.get_double("l_m", c.l_m);
    c.packet_flits = static_cast<int>(kv.get_int("packet_flits", c.packet_flits));
    c.flit_bits = static_cast<int>(kv.get_int("flit_bits", c.flit_bits));
    c.buffer_flits = static_cast<int>(kv.get_int("buffer_flits", c.buffer_flits));
    c.gw_buffer_flits = static_cast<int>(kv.get_int("gw_buffer_flits", c.gw_buffer_flits));
    c.optical_prop_cycles = static_cast<int>(kv.get_int("optical_prop_cycles", c.optical_prop_cycles));
    c.initial_gateways = static_cast<int>(kv.get_int("initial_gateways", c.initial_gateways));
    c.dynamic_gateways = kv.get_bool("dynamic_gateways", c.dynamic_gateways);
    c.drain_timeout_cycles =
        static_cast<uint64_t>(kv.get_int("drain_timeout_cycles", c.drain_timeout_cycles));
    c.seed = static_cast<uint64_t>(kv.get_int("seed", c.seed));
    c.cycles = static_cast<uint64_t>(kv.get_int("cycles", c.cycles));
    c.warmup_cycles = static_cast<uint64_t>(kv.get_int("warmup_cycles", c.warmup_cycles));
    c.mode = parse_mode(kv.get_str("mode", mode_name(c.mode)));

    c.wdm_min_wavelengths = static_cast<int>(kv.get_int("wdm_min_wavelengths", c.wdm_min_wavelengths));
    c.wdm_initial_wavelengths =
        static_cast<int>(kv.get_int("wdm_initial_wavelengths", c.wdm_initial_wavelengths));
    c.wdm_mem_wavelengths = static_cast<int>(kv.get_int("wdm_mem_wavelengths", c.wdm_mem_wavelengths));
    c.wdm_per_wavelength_lmax = kv.get_double("wdm_per_wavelength_lmax", c.wdm_per_wavelength_lmax);

    c.power.laser_mw_per_wavelength_per_waveguide =
        kv.get_double("power.laser_mw", c.power.laser_mw_per_wavelength_per_waveguide);
    c.power.tia_mw = kv.get_double("power.tia_mw", c.power.tia_mw);
    c.power.tuning_mw_per_mr = kv.get_double("power.tuning_mw_per_mr", c.power.tuning_mw_per_mr);
    c.power.driver_mw = kv.get_double("power.driver_mw", c.power.driver_mw);
    c.power.controller_uw = kv.get_double("power.controller_uw", c.power.controller_uw);
    c.power.pcm_reconfig_nj = kv.get_double("power.pcm_reconfig_nj", c.power.pcm_reconfig_nj);
    c.power.laser_wall_plug_efficiency =
        kv.get_double("power.laser_wall_plug_efficiency", c.power.laser_wall_plug_efficiency);

    c.traffic.pattern = parse_pattern(kv.get_str("traffic.pattern", "uniform"), kv);
    std::string proc = kv.get_str("traffic.process", "bernoulli");
    if (proc == "bernoulli")
        c.traffic.process = InjectionProcess::Bernoulli;
    else if (proc == "periodic")
        c.traffic.process = InjectionProcess::Periodic;
    else
        throw ConfigError("traffic.process must be bernoulli or periodic, got " + proc);
    c.traffic.rate = kv.get_double("traffic.rate", c.traffic.rate);
    c.traffic.mem_fraction = kv.get_double("traffic.mem_fraction", c.traffic.mem_fraction);
    c.traffic.trace_path = kv.get_str("traffic.trace", "");

    for (const std::string& tok : split_ws(kv.get_str("traffic.hotspot.targets", "")))
        c.traffic.hotspot_targets.push_back(std::stoi(tok));
    for (const std::string& tok : split_ws(kv.get_str("traffic.hotspot.weights", "")))
        c.traffic.hotspot_weights.push_back(std::stod(tok));

    int n_phases = static_cast<int>(kv.get_int("traffic.phases", 0));
    for (int i = 0; i < n_phases; ++i) {
        std::string p = "traffic.phase." + std::to_string(i) + ".";
        TrafficPhase ph;
        ph.pattern = parse_pattern(kv.get_str(p + "pattern", "uniform"), kv);
        ph.rate = kv.get_double(p + "rate", 0.0);
        ph.duration_cycles = static_cast<uint64_t>(kv.get_int(p + "duration", 0));
        c.traffic.phases.push_back(ph);
    }

    // gateway.<chiplet>.<idx> = row,col
    for (const auto& [key, value] : kv.entries()) {
        if (key.rfind("gateway.", 0) != 0) continue;
        std::string rest = key.substr(8);
        size_t dot = rest.find('.');
        if (dot == std::string::npos)
            throw ConfigError("bad gateway key (want gateway.<chiplet>.<idx>): " + key);
        GatewayPlacement g;
        try {
            g.chiplet = std::stoi(rest.substr(0, dot));
            g.index = std::stoi(rest.substr(dot + 1));
            size_t comma = value.find(',');
            if (comma == std::string::npos) throw std::invalid_argument("no comma");
            g.row = std::stoi(trim(value.substr(0, comma)));
            g.col = std::stoi(trim(value.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ConfigError("bad gateway placement `" + key + " = " + value +
                              "` (want gateway.<chiplet>.<idx> = row,col)");
        }
        c.explicit_placements.push_back(g);
        kv.get_str(key, "");  // mark read
    }

    std::vector<std::string> unread = kv.unread_keys();
    if (!unread.empty()) {
        std::string msg = "unknown config key(s):";
        for (const auto& k : unread) msg += " " + k;
        throw ConfigError(msg);
    }

    c.validate();
    return c;
}

void SystemConfig::validate() const {
    std::vector<std::string> errs;
    if (num_chiplets < 2) errs.push_back("num_chiplets must be >= 2");
    if (mesh_rows < 1 || mesh_cols < 1) errs.push_back("mesh dims must be >= 1");
    if (max_gateways_per_chiplet < 1) errs.push_back("max_gateways_per_chiplet must be >= 1");
    if (mesh_rows * mesh_cols < max_gateways_per_chiplet)
        errs.push_back("mesh must have at least as many routers as gateways");
    if (mem_gateways < 0) errs.push_back("mem_gateways must be >= 0");
    if (wavelengths < 1) errs.push_back("wavelengths must be >= 1");
    if (datarate_gbps <= 0) errs.push_back("datarate_gbps must be > 0");
    if (noc_freq_ghz <= 0) errs.push_back("noc_freq_ghz must be > 0");
    if (interval_cycles < 1000) errs.push_back("interval_cycles must be >= 1000");
    if (l_m <= 0) errs.push_back("l_m must be > 0");
    if (packet_flits < 2) errs.push_back("packet_flits must be >= 2 (head + tail)");
    if (flit_bits < 1) errs.push_back("flit_bits must be >= 1");
    if (buffer_flits < 1) errs.push_back("buffer_flits must be >= 1");
    if (gw_buffer_flits < packet_flits)
        errs.push_back("gw_buffer_flits must hold a full packet (store-and-forward at gateways)");
    if (optical_prop_cycles < 0) errs.push_back("optical_prop_cycles must be >= 0");
    if (initial_gateways == 0 || initial_gateways < -1 ||
        initial_gateways > max_gateways_per_chiplet)
        errs.push_back("initial_gateways must be in [1, max_gateways_per_chiplet] or -1");
    if (traffic.rate < 0 || traffic.rate > 1) errs.push_back("traffic.rate must be in [0, 1]");
    if (traffic.mem_fraction < 0 || traffic.mem_fraction > 1)
        errs.push_back("traffic.mem_fraction must be in [0, 1]");
    if (traffic.mem_fraction > 0 && mem_gateways == 0)
        errs.push_back("traffic.mem_fraction > 0 requires mem_gateways > 0");
    if (traffic.pattern == TrafficPattern::Hotspot) {
        if (traffic.hotspot_targets.empty()) errs.push_back("hotspot pattern needs targets");
        if (!traffic.hotspot_weights.empty() &&
            traffic.hotspot_weights.size() != traffic.hotspot_targets.size())
            errs.push_back("hotspot weights must match targets");
    }
    if (traffic.pattern == TrafficPattern::Phased) {
        if (traffic.phases.empty()) errs.push_back("phased pattern needs traffic.phases >= 1");
        for (const auto& ph : traffic.phases)
            if (ph.duration_cycles < interval_cycles)
                errs.push_back("phase durations must be at least one interval");
    }
    if (traffic.pattern == TrafficPattern::Trace && traffic.trace_path.empty())
        errs.push_back("trace pattern needs traffic.trace = <path>");
    if (power.laser_mw_per_wavelength_per_waveguide < 0 || power.tia_mw < 0 ||
        power.tuning_mw_per_mr < 0 || power.driver_mw < 0 || power.controller_uw < 0 ||
        power.pcm_reconfig_nj < 0)
        errs.push_back("power constants must be non-negative");
    if (mode == RunMode::WdmScaling) {
        if (wdm_min_wavelengths < 1 || wdm_min_wavelengths > wavelengths)
            errs.push_back("wdm_min_wavelengths must be in [1, wavelengths]");
        if (wdm_mem_wavelengths < 1) errs.push_back("wdm_mem_wavelengths must be >= 1");
    }
    if (!errs.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
}

std::map<std::string, std::string> SystemConfig::to_kv() const {
    std::map<std::string, std::string> m;
    m["num_chiplets"] = std::to_string(num_chiplets);
    m["mesh_rows"] = std::to_string(mesh_rows);
    m["mesh_cols"] = std::to_string(mesh_cols);
    m["max_gateways_per_chiplet"] = std::to_string(max_gateways_per_chiplet);
    m["mem_gateways"] = std::to_string(mem_gateways);
    m["wavelengths"] = std::to_string(wavelengths);
    m["datarate_gbps"] = fmt_double(datarate_gbps);
    m["noc_freq_ghz"] = fmt_double(noc_freq_ghz);
    m["interval_cycles"] = std::to_string(interval_cycles);
    m["l_m"] = fmt_double(l_m);
    m["packet_flits"] = std::to_string(packet_flits);
    m["flit_bits"] = std::to_string(flit_bits);
    m["buffer_flits"] = std::to_string(buffer_flits);
    m["gw_buffer_flits"] = std::to_string(gw_buffer_flits);
    m["optical_prop_cycles"] = std::to_string(optical_prop_cycles);
    m["initial_gateways"] = std::to_string(initial_gateways);
    m["dynamic_gateways"] = dynamic_gateways ? "true" : "false";
    m["drain_timeout_cycles"] = std::to_string(drain_timeout_cycles);
    m["seed"] = std::to_string(seed);
    m["cycles"] = std::to_string(cycles);
    m["warmup_cycles"] = std::to_string(warmup_cycles);
    m["mode"] = mode_name(mode);
    m["wdm_min_wavelengths"] = std::to_string(wdm_min_wavelengths);
    m["wdm_initial_wavelengths"] = std::to_string(wdm_initial_wavelengths);
    m["wdm_mem_wavelengths"] = std::to_string(wdm_mem_wavelengths);
    m["wdm_per_wavelength_lmax"] = fmt_double(wdm_per_wavelength_lmax);
    m["power.laser_mw"] = fmt_double(power.laser_mw_per_wavelength_per_waveguide);
    m["power.tia_mw"] = fmt_double(power.tia_mw);
    m["power.tuning_mw_per_mr"] = fmt_double(power.tuning_mw_per_mr);
    m["power.driver_mw"] = fmt_double(power.driver_mw);
    m["power.controller_uw"] = fmt_double(power.controller_uw);
    m["power.pcm_reconfig_nj"] = fmt_double(power.pcm_reconfig_nj);
    m["power.laser_wall_plug_efficiency"] = fmt_double(power.laser_wall_plug_efficiency);
    m["traffic.pattern"] = pattern_name(traffic.pattern);
    m["traffic.process"] =
        traffic.process == InjectionProcess::Bernoulli ? "bernoulli" : "periodic";
    m["traffic.rate"] = fmt_double(traffic.rate);
    m["traffic.mem_fraction"] = fmt_double(traffic.mem_fraction);
    if (!traffic.trace_path.empty()) m["traffic.trace"] = traffic.trace_path;
    if (!traffic.phases.empty()) {
        m["traffic.phases"] = std::to_string(traffic.phases.size());
        for (size_t i = 0; i < traffic.phases.size(); ++i) {
            std::string p = "traffic.phase." + std::to_string(i) + ".";
            m[p + "pattern"] = pattern_name(traffic.phases[i].pattern);
            m[p + "rate"] = fmt_double(traffic.phases[i].rate);
            m[p + "duration"] = std::to_string(traffic.phases[i].duration_cycles);
        }
    }
    for (const auto& g : explicit_placements)
        m["gateway." + std::to_string(g.chiplet) + "." + std::to_string(g.index)] =
            std::to_string(g.row) + "," + std::to_string(g.col);
    return m;
}

uint64_t SystemConfig::pcmc_reconfig_cycles() const {
    return static_cast<uint64_t>(std::ceil(100.0 * noc_freq_ghz));
}

SystemConfig load_config(const std::string& path, RunMode preset,
                         const std::map<std::string, std::string>& cli_overrides) {
    KeyValueConfig kv = path.empty() ? KeyValueConfig::parse_string("")
                                     : KeyValueConfig::parse_file(path);
    for (const auto& [k, v] : preset_overrides(preset)) kv.set(k, v);
    for (const auto& [k, v] : cli_overrides) kv.set(k, v);
    return SystemConfig::from_kv(kv);
}

}  // namespace resipi
