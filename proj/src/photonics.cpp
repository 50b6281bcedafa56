#include "photonics.hpp"

#include <cmath>
#include <stdexcept>

namespace resipi {

std::pair<double, double> pcmc_split(double kappa, double p_in) {
    if (kappa < 0.0 || kappa > 1.0)
        throw std::invalid_argument("coupling ratio must lie in [0, 1]");
    if (p_in < 0.0) throw std::invalid_argument("input power must be non-negative");
    double cross = kappa * p_in;
    double bar = p_in - cross;  // keeps cross + bar == p_in
    return {cross, bar};
}

std::vector<double> coupling_ratios(const std::vector<uint8_t>& active) {
    int n = static_cast<int>(active.size());
    int total = 0;
    for (uint8_t a : active) total += a ? 1 : 0;
    if (total == 0) throw std::invalid_argument("at least one gateway must be active");

    std::vector<double> kappas(n - 1, 0.0);
    int served = 0;
    for (int k = 0; k + 1 < n; ++k) {
        if (active[k]) {
            kappas[k] = 1.0 / static_cast<double>(total - served);
            ++served;
        }
    }
    return kappas;
}

ChainPowers propagate_chain(const std::vector<double>& kappas, double laser_mw) {
    ChainPowers out;
    int n = static_cast<int>(kappas.size()) + 1;
    out.mrg_input_mw.assign(n, 0.0);
    double remaining = laser_mw;
    for (int k = 0; k + 1 < n; ++k) {
        auto [cross, bar] = pcmc_split(kappas[k], remaining);
        out.mrg_input_mw[k] = cross;
        remaining = bar;
    }
    out.mrg_input_mw[n - 1] = remaining;  // final Bar feeds the last MRG
    out.terminal_bar_mw = remaining;
    return out;
}

PowerMap power_map(const std::vector<uint8_t>& active, double laser_mw) {
    int n = static_cast<int>(active.size());
    int total = 0;
    for (uint8_t a : active) total += a ? 1 : 0;
    if (total == 0) throw std::invalid_argument("at least one gateway must be active");

    PowerMap map;
    map.delivered_mw.assign(n, 0.0);
    double share = laser_mw / static_cast<double>(total);
    double delivered_sum = 0.0;
    for (int k = 0; k < n; ++k) {
        if (active[k]) {
            map.delivered_mw[k] = share;
            delivered_sum += share;
        }
    }
    map.waste_mw = laser_mw - delivered_sum;
    return map;
}

double laser_power_required(int active_gateways, int wavelengths, const PowerModel& model) {
    if (active_gateways < 0) throw std::invalid_argument("active gateway count must be >= 0");
    return static_cast<double>(wavelengths) * model.laser_mw_per_wavelength_per_waveguide *
           static_cast<double>(active_gateways);
}

ActivationState ActivationState::uniform(const std::vector<uint8_t>& active, int wavelengths) {
    ActivationState s;
    s.writer_active = active;
    s.reader_active = active;
    s.wavelengths_per_gateway.assign(active.size(), wavelengths);
    return s;
}

PowerBreakdown network_power(const ActivationState& state, const PowerModel& model) {
    size_t n = state.writer_active.size();
    if (state.reader_active.size() != n || state.wavelengths_per_gateway.size() != n)
        throw std::invalid_argument("activation state vectors must have equal length");

    PowerBreakdown p;
    double modulator_mrs = 0.0;
    double filter_mrs = 0.0;
    for (size_t w = 0; w < n; ++w) {
        if (!state.writer_active[w]) continue;
        double lambdas = static_cast<double>(state.wavelengths_per_gateway[w]);
        p.laser_mw += lambdas * model.laser_mw_per_wavelength_per_waveguide;
        modulator_mrs += lambdas;
        // Every active reader keeps one filter row tuned per active source.
        for (size_t r = 0; r < n; ++r)
            if (r != w && state.reader_active[r]) filter_mrs += lambdas;
    }
    p.laser_mw /= model.laser_wall_plug_efficiency;
    p.driver_mw = model.driver_mw * modulator_mrs;
    p.tuning_mw = model.tuning_mw_per_mr * (modulator_mrs + filter_mrs);
    p.tia_mw = model.tia_mw * filter_mrs;
    p.controller_mw = model.controller_mw();
    p.total_mw = p.laser_mw + p.tuning_mw + p.tia_mw + p.driver_mw + p.controller_mw;
    return p;
}

double awgr_static_power_mw(int n_gateways, const PowerModel& model) {
    // One dedicated wavelength per always-on gateway.
    std::vector<uint8_t> all(n_gateways, 1);
    ActivationState s = ActivationState::uniform(all, 1);
    return network_power(s, model).total_mw;
}

ReconfigResult apply_reconfiguration(PhotonicState& state, const std::vector<uint8_t>& new_active,
                                     int wavelengths, uint64_t now, const PowerModel& model,
                                     double noc_freq_ghz) {
    if (static_cast<int>(new_active.size()) != state.layout.n)
        throw std::invalid_argument("activation mask size does not match the interposer");
    for (const PcmcState& pc : state.pcmc)
        if (pc.busy_until > now)
            throw std::logic_error("reconfiguration requested while a previous one is in flight");
    if (state.laser.busy_until > now)
        throw std::logic_error("reconfiguration requested while the laser is retuning");

    std::vector<double> target = coupling_ratios(new_active);
    ReconfigResult res;
    uint64_t pcmc_cycles = static_cast<uint64_t>(std::ceil(100.0 * noc_freq_ghz));
    for (size_t k = 0; k < target.size(); ++k) {
        if (state.pcmc[k].kappa != target[k]) {
            state.pcmc[k].kappa = target[k];
            state.pcmc[k].target_kappa = target[k];
            state.pcmc[k].busy_until = now + pcmc_cycles;
            ++res.pcmcs_changed;
        }
    }
    res.energy_nj = model.pcm_reconfig_nj * res.pcmcs_changed;
    state.reconfig_energy_nj += res.energy_nj;

    double per_waveguide = static_cast<double>(wavelengths) *
                           model.laser_mw_per_wavelength_per_waveguide;
    if (state.laser.output_power_mw_per_waveguide != per_waveguide) {
        state.laser.output_power_mw_per_waveguide = per_waveguide;
        res.laser_changed = true;
    }
    // Laser level also steps whenever the active waveguide count moves; the
    // SOA tune is sub-nanosecond, rounded up to one cycle.
    if (res.pcmcs_changed > 0 || res.laser_changed) {
        state.laser.busy_until = now + 1;
        res.laser_busy_until = now + 1;
    }
    if (res.pcmcs_changed > 0) res.pcmc_busy_until = now + pcmc_cycles;
    return res;
}

}  // namespace resipi
