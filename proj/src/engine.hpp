#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

#include "config.hpp"
#include "controller.hpp"
#include "metrics.hpp"
#include "photonics.hpp"
#include "selection.hpp"
#include "topology.hpp"
#include "traffic.hpp"

namespace resipi {

enum class FlitKind : uint8_t { Head, Body, Tail };

struct Flit {
    FlitKind kind = FlitKind::Head;
    bool measured = false;       // injected after warm-up; eligible for stats
    uint16_t flit_index = 0;
    uint32_t packet_id = 0;
    int src_node = 0;
    int dst_node = 0;
    int target_gateway = -1;     // source-side gateway, re-resolved if it goes away
    uint64_t inject_cycle = 0;
    uint64_t enter_cycle = 0;    // when the flit was handed toward its current buffer
};

enum class GatewayOpState : uint8_t { Off, Operational, Activating, Draining };

// Router ports. XY routing resolves the column first.
constexpr int kPortNorth = 0;
constexpr int kPortEast = 1;
constexpr int kPortSouth = 2;
constexpr int kPortWest = 3;
constexpr int kPortLocal = 4;
constexpr int kPortGateway = 5;
constexpr int kPortCount = 6;

// Next hop toward a target router; kPortLocal when already there.
int xy_next_port(int row, int col, int tgt_row, int tgt_col);

// Serialization cycles for one packet over an SWMR waveguide.
int optical_transmit_latency_cycles(int packet_bits, int active_wavelengths,
                                    double datarate_gbps, double noc_freq_ghz);

struct DeliveryRecord {
    int src_node;
    int dst_node;
    uint32_t packet_id;
    uint64_t inject_cycle;
    uint64_t deliver_cycle;
};

// Cycle-accurate flit-level engine: wormhole mesh routers with credit-based
// flow control, store-and-forward gateways (the interposer dateline), an
// SWMR optical channel per writer, and the reconfiguration machinery that
// realizes controller plans (drain, retune, activation windows).
//
// Single-owner state machine: construct, then call step()/run(). Identical
// (config, seed) gives identical cycle-by-cycle state.
class Engine {
public:
    Engine(const SystemConfig& config, const Topology& topo);
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    void step();
    void run(uint64_t cycles) { for (uint64_t i = 0; i < cycles; ++i) step(); }
    // Flushes the trailing partial interval into the metrics.
    void finish_run();

    uint64_t now() const { return now_; }

    // Manual injection (tests and trace-free experiments).
    void inject_packet(int src_node, int dst_node, int payload_bits);

    // --- observers -----------------------------------------------------------
    MetricsCollector& metrics() { return metrics_; }
    const MetricsCollector& metrics() const { return metrics_; }
    const ResidencyMap& residency() const { return residency_; }
    const ReconfigController& controller() const { return controller_; }
    const PhotonicState& photonics() const { return photonics_; }
    const Topology& topology() const { return topo_; }
    const std::vector<SelectionTable>& selection_tables() const { return tables_; }

    GatewayOpState gateway_state(int gateway_id) const { return gateways_[gateway_id].state; }
    uint64_t gateway_live_at(int gateway_id) const { return gateways_[gateway_id].live_at; }
    int gateway_wavelengths(int gateway_id) const { return gateways_[gateway_id].wavelengths; }
    int operational_count(int chiplet) const;
    PowerBreakdown current_power() const;

    uint64_t injected_flits() const { return injected_flits_; }
    uint64_t delivered_flits() const { return delivered_flits_; }
    uint64_t in_flight_flits() const;  // walks every buffer; audit helper
    uint64_t total_injected_packets() const { return next_packet_id_; }

    void set_record_deliveries(bool on) { record_deliveries_ = on; }
    const std::vector<DeliveryRecord>& delivery_log() const { return delivery_log_; }

private:
    struct InputPort {
        std::deque<Flit> buffer;
        int locked_output = -1;
        int route = -1;
    };
    struct OutputPort {
        int locked_input = -1;
        int rr = 0;
        int credits = 0;
    };
    struct Router {
        std::array<InputPort, kPortCount> in;
        std::array<OutputPort, kPortCount> out;
        int gateway_id = -1;
    };
    struct OpticalPacket {
        std::vector<Flit> flits;
        uint64_t arrive_at = 0;
        int dest_gateway = -1;
    };
    struct GatewayUnit {
        GatewayInfo info;
        GatewayOpState state = GatewayOpState::Off;
        uint64_t live_at = 0;
        int wavelengths = 0;
        // writer side
        std::deque<Flit> ingress;
        int staged_ingress = 0;        // flits committed next cycle
        int ingress_credits = 0;       // held by the injector for memory gateways
        bool serializing = false;
        uint64_t ser_done_at = 0;
        OpticalPacket ser_packet;
        std::deque<OpticalPacket> in_flight;
        // reader side
        std::vector<std::deque<Flit>> reader_queues;  // by source gateway id
        int reader_rr = 0;
        int streaming_src = -1;        // packet-granular round-robin
        int eject_credits = 0;         // space in the attached router's gateway port
        int inbound_in_flight = 0;     // packets serialized/propagating toward us
    };
    struct Staged {
        bool to_ingress = false;
        int chiplet = 0;
        int router = 0;
        int port = 0;
        int gateway = -1;
        uint64_t commit_at = 0;
        Flit flit;
    };
    struct PendingPlan {
        bool active = false;
        ReconfigurationPlan plan;
        std::vector<int> g_before;
        std::vector<int> g_after;
    };

    // step phases
    void process_boundary();
    void progress_reconfiguration();
    void optical_phase();
    void router_phase();
    void injection_phase();
    void generation_phase();
    void commit_phase();

    int compute_route(Flit& head, int chiplet, int router_idx);
    int resolve_source_gateway(int chiplet, int row, int col) const;
    int resolve_dest_gateway(int dst_node) const;
    bool gateway_accepting(int gateway_id) const;
    bool gateway_can_transmit(const GatewayUnit& g) const;
    bool gateway_empty(const GatewayUnit& g) const;
    void start_plan(const ReconfigurationPlan& plan, const std::vector<int>& before,
                    const std::vector<int>& after);
    void execute_retune();
    void abort_plan();
    void try_start_serialization(GatewayUnit& g);
    void eject_reader_flit(GatewayUnit& g);
    void deliver_flit(const Flit& flit);
    std::vector<uint8_t> powered_mask() const;
    void note_power_change();
    uint32_t operational_mask(int chiplet) const;

    Router& router(int chiplet, int idx) { return routers_[chiplet][idx]; }

    SystemConfig cfg_;
    Topology topo_;
    std::vector<SelectionTable> tables_;
    ReconfigController controller_;
    PhotonicState photonics_;
    MetricsCollector metrics_;
    ResidencyMap residency_;
    std::unique_ptr<TrafficGenerator> traffic_;

    std::vector<std::vector<Router>> routers_;
    std::vector<GatewayUnit> gateways_;
    std::vector<std::deque<Flit>> inject_queues_;  // per node (cores + memory)
    std::vector<int> inject_credits_;              // per core node
    std::vector<Staged> staging_;
    std::vector<int*> credit_returns_;
    std::vector<uint64_t> sends_per_gateway_;      // per interval, for wdm scaling

    PendingPlan pending_;
    bool gateway_dynamics_ = true;
    bool wdm_dynamics_ = false;

    uint64_t now_ = 0;
    uint64_t warmup_end_ = 0;
    uint64_t next_boundary_ = 0;
    int ser_latency_uniform_ = 0;  // cached for the uniform-wavelength modes

    uint64_t injected_flits_ = 0;
    uint64_t delivered_flits_ = 0;
    uint32_t next_packet_id_ = 0;

    bool record_deliveries_ = false;
    std::vector<DeliveryRecord> delivery_log_;

    static constexpr int kPipelineDepth = 2;  // route+allocate, traverse
};

}  // namespace resipi
