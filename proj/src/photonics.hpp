#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "config.hpp"
#include "topology.hpp"

namespace resipi {

struct PcmcState {
    double kappa = 0.0;
    double target_kappa = 0.0;
    uint64_t busy_until = 0;  // end of an in-progress state change
};

struct LaserState {
    double output_power_mw_per_waveguide = 0.0;
    double wall_plug_efficiency = 1.0;
    uint64_t busy_until = 0;
};

struct PowerBreakdown {
    double laser_mw = 0.0;
    double tuning_mw = 0.0;
    double tia_mw = 0.0;
    double driver_mw = 0.0;
    double controller_mw = 0.0;
    double total_mw = 0.0;
    double reconfig_energy_nj = 0.0;  // cumulative at snapshot time
};

// Lossless PCM coupler: cross = kappa * p_in, bar = the remainder.
std::pair<double, double> pcmc_split(double kappa, double p_in);

// Coupling ratios for the N-1 chain couplers under an activation mask over N
// gateways. Inactive taps get 0; walking the chain, the j-th active tap
// (j from 0) gets 1/(GT - j), so every active MRG input sees an equal share
// of the laser budget. The final MRG rides the last Bar port.
std::vector<double> coupling_ratios(const std::vector<uint8_t>& active);

// Walks the chain applying pcmc_split at every coupler. Independent of the
// equal-split shortcut, so tests use it as the propagation oracle.
struct ChainPowers {
    std::vector<double> mrg_input_mw;  // per MRG, including the final Bar-fed one
    double terminal_bar_mw = 0.0;      // light left over past the last active tap
};
ChainPowers propagate_chain(const std::vector<double>& kappas, double laser_mw);

// Equal-split delivery map: P/GT per active gateway, residual charged to the
// terminal Bar so that delivered + waste reproduces the laser budget exactly.
struct PowerMap {
    std::vector<double> delivered_mw;
    double waste_mw = 0.0;
};
PowerMap power_map(const std::vector<uint8_t>& active, double laser_mw);

// Total laser budget: each active writer drives its own SWMR waveguide.
double laser_power_required(int active_gateways, int wavelengths, const PowerModel& model);

// Activation state for power queries. Writers and readers are normally the
// same set; they are separate so degenerate link configurations (one writer,
// one reader) are expressible. wavelengths_per_gateway holds each gateway's
// active wavelength count (uniform for the reconfigurable-gateway fabric,
// heterogeneous for the wavelength-scaling baseline).
struct ActivationState {
    std::vector<uint8_t> writer_active;
    std::vector<uint8_t> reader_active;
    std::vector<int> wavelengths_per_gateway;

    static ActivationState uniform(const std::vector<uint8_t>& active, int wavelengths);
};

// Power of everything currently lit: laser, modulator drivers, tuning of
// powered MRs (modulators of active writers, filter rows of active readers
// for currently active sources), TIAs behind powered filters, plus the fixed
// controller power. Idle gateways are fully power-gated.
PowerBreakdown network_power(const ActivationState& state, const PowerModel& model);

// Static power of an always-on single-wavelength-per-gateway fabric; kept as
// a reference figure in run summaries.
double awgr_static_power_mw(int n_gateways, const PowerModel& model);

// Mutable photonic state owned by the engine.
struct PhotonicState {
    InterposerLayout layout;
    std::vector<PcmcState> pcmc;
    LaserState laser;
    double reconfig_energy_nj = 0.0;

    explicit PhotonicState(InterposerLayout lay)
        : layout(std::move(lay)), pcmc(layout.n - 1) {}
};

struct ReconfigResult {
    int pcmcs_changed = 0;
    double energy_nj = 0.0;
    bool laser_changed = false;
    uint64_t pcmc_busy_until = 0;
    uint64_t laser_busy_until = 0;
};

// Retunes the chain to serve `new_active`, marking changed couplers busy for
// the PCM switching window (100 ns at the NoC clock) and the laser for one
// cycle. Charges 2 nJ per coupler whose ratio moved. Throws if a previous
// reconfiguration is still in flight.
ReconfigResult apply_reconfiguration(PhotonicState& state, const std::vector<uint8_t>& new_active,
                                     int wavelengths, uint64_t now, const PowerModel& model,
                                     double noc_freq_ghz);

}  // namespace resipi
