#include "engine.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace resipi {

int xy_next_port(int row, int col, int tgt_row, int tgt_col) {
    if (col < tgt_col) return kPortEast;
    if (col > tgt_col) return kPortWest;
    if (row < tgt_row) return kPortSouth;
    if (row > tgt_row) return kPortNorth;
    return kPortLocal;
}

int optical_transmit_latency_cycles(int packet_bits, int active_wavelengths,
                                    double datarate_gbps, double noc_freq_ghz) {
    if (active_wavelengths <= 0)
        throw std::invalid_argument("optical transmit needs at least one active wavelength");
    if (packet_bits <= 0) throw std::invalid_argument("packet must carry bits");
    double ns = static_cast<double>(packet_bits) /
                (static_cast<double>(active_wavelengths) * datarate_gbps);
    return static_cast<int>(std::ceil(ns * noc_freq_ghz));
}

Engine::Engine(const SystemConfig& config, const Topology& topo)
    : cfg_(config),
      topo_(topo),
      tables_(build_selection_tables(topo)),
      controller_(config.num_chiplets, config.max_gateways_per_chiplet, config.mem_gateways,
                  config.effective_initial_gateways(), config.interval_cycles, config.l_m),
      photonics_(build_interposer(topo.total_gateways(), config.wavelengths)) {
    gateway_dynamics_ = cfg_.dynamic_gateways && cfg_.mode != RunMode::WdmScaling;
    wdm_dynamics_ = cfg_.mode == RunMode::WdmScaling;

    int rpc = topo_.routers_per_chiplet();
    routers_.resize(topo_.num_chiplets);
    for (int c = 0; c < topo_.num_chiplets; ++c) {
        routers_[c].resize(rpc);
        for (int r = 0; r < rpc; ++r) {
            Router& rt = routers_[c][r];
            for (int p = 0; p < kPortCount; ++p)
                rt.out[p].credits = (p == kPortGateway) ? cfg_.gw_buffer_flits : cfg_.buffer_flits;
            rt.gateway_id = topo_.gateway_at[c][r];
        }
    }

    int n = topo_.total_gateways();
    int initial = cfg_.effective_initial_gateways();
    gateways_.resize(n);
    for (int g = 0; g < n; ++g) {
        GatewayUnit& gw = gateways_[g];
        gw.info = topo_.gateways[g];
        gw.reader_queues.resize(n);
        gw.eject_credits = cfg_.gw_buffer_flits;
        gw.ingress_credits = cfg_.gw_buffer_flits;
        if (gw.info.is_memory) {
            gw.state = GatewayOpState::Operational;
            gw.wavelengths = wdm_dynamics_ ? cfg_.wdm_mem_wavelengths : cfg_.wavelengths;
        } else {
            gw.state = gw.info.local_index < initial ? GatewayOpState::Operational
                                                     : GatewayOpState::Off;
            gw.wavelengths = wdm_dynamics_ ? (cfg_.wdm_initial_wavelengths < 0
                                                  ? cfg_.wavelengths
                                                  : cfg_.wdm_initial_wavelengths)
                                           : cfg_.wavelengths;
        }
    }
    ser_latency_uniform_ = optical_transmit_latency_cycles(cfg_.packet_bits(), cfg_.wavelengths,
                                                           cfg_.datarate_gbps, cfg_.noc_freq_ghz);

    // Initial photonic condition, applied without an event: the chain starts
    // tuned for the initial activation set.
    std::vector<double> kappas = coupling_ratios(powered_mask());
    for (size_t k = 0; k < kappas.size(); ++k) {
        photonics_.pcmc[k].kappa = kappas[k];
        photonics_.pcmc[k].target_kappa = kappas[k];
    }
    photonics_.laser.output_power_mw_per_waveguide =
        cfg_.wavelengths * cfg_.power.laser_mw_per_wavelength_per_waveguide;
    photonics_.laser.wall_plug_efficiency = cfg_.power.laser_wall_plug_efficiency;

    inject_queues_.resize(topo_.total_node_count());
    inject_credits_.assign(topo_.core_node_count(), cfg_.buffer_flits);
    sends_per_gateway_.assign(n, 0);
    residency_.init(topo_.num_chiplets, topo_.mesh_rows, topo_.mesh_cols);

    if (cfg_.traffic.rate > 0 || cfg_.traffic.pattern == TrafficPattern::Trace ||
        cfg_.traffic.pattern == TrafficPattern::Phased)
        traffic_ = std::make_unique<TrafficGenerator>(cfg_.traffic, topo_, cfg_.seed,
                                                      cfg_.packet_bits());

    warmup_end_ = cfg_.warmup_cycles;
    next_boundary_ = warmup_end_ + cfg_.interval_cycles;
    metrics_.begin_run(warmup_end_, current_power());
}

int Engine::operational_count(int chiplet) const {
    int count = 0;
    for (int i = 0; i < topo_.gateways_per_chiplet; ++i)
        if (gateways_[topo_.chiplet_gateway_id(chiplet, i)].state == GatewayOpState::Operational)
            ++count;
    return count;
}

uint32_t Engine::operational_mask(int chiplet) const {
    uint32_t mask = 0;
    for (int i = 0; i < topo_.gateways_per_chiplet; ++i)
        if (gateways_[topo_.chiplet_gateway_id(chiplet, i)].state == GatewayOpState::Operational)
            mask |= 1u << i;
    return mask;
}

std::vector<uint8_t> Engine::powered_mask() const {
    std::vector<uint8_t> mask(gateways_.size());
    for (size_t g = 0; g < gateways_.size(); ++g)
        mask[g] = gateways_[g].state != GatewayOpState::Off ? 1 : 0;
    return mask;
}

PowerBreakdown Engine::current_power() const {
    ActivationState s;
    s.writer_active = powered_mask();
    s.reader_active = s.writer_active;
    s.wavelengths_per_gateway.resize(gateways_.size());
    for (size_t g = 0; g < gateways_.size(); ++g)
        s.wavelengths_per_gateway[g] = gateways_[g].wavelengths;
    PowerBreakdown p = network_power(s, cfg_.power);
    p.reconfig_energy_nj = photonics_.reconfig_energy_nj;
    return p;
}

void Engine::note_power_change() { metrics_.power_changed(now_, current_power()); }

bool Engine::gateway_accepting(int gateway_id) const {
    return gateways_[gateway_id].state == GatewayOpState::Operational;
}

bool Engine::gateway_can_transmit(const GatewayUnit& g) const {
    return g.state == GatewayOpState::Operational || g.state == GatewayOpState::Draining;
}

bool Engine::gateway_empty(const GatewayUnit& g) const {
    if (!g.ingress.empty() || g.staged_ingress > 0 || g.serializing) return false;
    if (!g.in_flight.empty() || g.inbound_in_flight > 0) return false;
    for (const auto& q : g.reader_queues)
        if (!q.empty()) return false;
    return true;
}

int Engine::resolve_source_gateway(int chiplet, int row, int col) const {
    int g = operational_count(chiplet);
    int local = tables_[chiplet].source_gateway_for(row, col, g);
    return topo_.chiplet_gateway_id(chiplet, local);
}

int Engine::resolve_dest_gateway(int dst_node) const {
    if (topo_.is_memory_node(dst_node))
        return topo_.memory_gateway_id(topo_.memory_index_of_node(dst_node));
    RouterCoord c = topo_.coord_of(dst_node);
    uint32_t mask = operational_mask(c.chiplet);
    int local = tables_[c.chiplet].dest_gateway_for(c.row, c.col, mask);
    return topo_.chiplet_gateway_id(c.chiplet, local);
}

int Engine::compute_route(Flit& head, int chiplet, int router_idx) {
    int row = router_idx / topo_.mesh_cols;
    int col = router_idx % topo_.mesh_cols;
    int dst = head.dst_node;
    if (!topo_.is_memory_node(dst) && topo_.chiplet_of_node(dst) == chiplet) {
        RouterCoord t = topo_.coord_of(dst);
        return xy_next_port(row, col, t.row, t.col);
    }
    // Needs the interposer. Packets keep their source gateway unless it went
    // away, in which case selection re-resolves at the current router.
    int tgt = head.target_gateway;
    if (tgt < 0 || !gateway_accepting(tgt))
        tgt = head.target_gateway = resolve_source_gateway(chiplet, row, col);
    const RouterCoord& gr = gateways_[tgt].info.router;
    if (gr.row == row && gr.col == col) return kPortGateway;
    return xy_next_port(row, col, gr.row, gr.col);
}

void Engine::inject_packet(int src_node, int dst_node, int payload_bits) {
    if (src_node < 0 || src_node >= topo_.total_node_count() || dst_node < 0 ||
        dst_node >= topo_.total_node_count())
        throw std::invalid_argument("node id outside the topology");
    if (src_node == dst_node) throw std::invalid_argument("packet to self");
    int packets = (payload_bits + cfg_.packet_bits() - 1) / cfg_.packet_bits();
    for (int p = 0; p < packets; ++p) {
        uint32_t id = next_packet_id_++;
        for (int f = 0; f < cfg_.packet_flits; ++f) {
            Flit flit;
            flit.kind = f == 0 ? FlitKind::Head
                               : (f == cfg_.packet_flits - 1 ? FlitKind::Tail : FlitKind::Body);
            flit.measured = now_ >= warmup_end_;
            flit.flit_index = static_cast<uint16_t>(f);
            flit.packet_id = id;
            flit.src_node = src_node;
            flit.dst_node = dst_node;
            flit.inject_cycle = now_;
            inject_queues_[src_node].push_back(flit);
        }
        injected_flits_ += cfg_.packet_flits;
    }
}

void Engine::deliver_flit(const Flit& flit) {
    ++delivered_flits_;
    if (flit.kind != FlitKind::Tail) return;
    if (flit.measured && now_ >= warmup_end_)
        metrics_.record_delivery(flit.inject_cycle, now_);
    if (record_deliveries_)
        delivery_log_.push_back(
            {flit.src_node, flit.dst_node, flit.packet_id, flit.inject_cycle, now_});
}

// --- reconfiguration ---------------------------------------------------------

void Engine::start_plan(const ReconfigurationPlan& plan, const std::vector<int>& before,
                        const std::vector<int>& after) {
    pending_.active = true;
    pending_.plan = plan;
    pending_.g_before = before;
    pending_.g_after = after;
    // Deactivation candidates stop taking new packets right away and flush.
    for (int id : plan.deactivate) gateways_[id].state = GatewayOpState::Draining;
}

void Engine::execute_retune() {
    uint64_t cycle = now_;
    for (int id : pending_.plan.deactivate) gateways_[id].state = GatewayOpState::Off;

    std::vector<uint8_t> mask = powered_mask();
    for (int id : pending_.plan.activate) mask[id] = 1;
    ReconfigResult res = apply_reconfiguration(photonics_, mask, cfg_.wavelengths, cycle,
                                               cfg_.power, cfg_.noc_freq_ghz);

    uint64_t window = cfg_.pcmc_reconfig_cycles();
    for (int id : pending_.plan.activate) {
        gateways_[id].state = GatewayOpState::Activating;
        gateways_[id].live_at = cycle + window;
    }

    ReconfigEvent ev;
    ev.cycle = cycle;
    ev.g_before = pending_.g_before;
    ev.g_after = pending_.g_after;
    ev.gt_before = pending_.plan.gt_before;
    ev.gt_after = pending_.plan.gt_after;
    ev.pcmcs_retuned = res.pcmcs_changed;
    ev.energy_nj = res.energy_nj;
    ev.activated = pending_.plan.activate;
    ev.deactivated = pending_.plan.deactivate;
    ev.activation_window = window;
    metrics_.add_reconfig_event(ev);

    note_power_change();
    pending_.active = false;
}

void Engine::abort_plan() {
    // A drain ran past its timeout: put the candidates back in service and
    // roll the controller back; the whole plan retries next interval.
    for (int id : pending_.plan.deactivate)
        gateways_[id].state = GatewayOpState::Operational;
    for (int c = 0; c < topo_.num_chiplets; ++c)
        controller_.set_active(c, pending_.g_before[c]);
    ReconfigEvent ev;
    ev.cycle = now_;
    ev.deferred = true;
    metrics_.add_reconfig_event(ev);
    pending_.active = false;
}

void Engine::progress_reconfiguration() {
    for (auto& gw : gateways_) {
        if (gw.state == GatewayOpState::Activating && gw.live_at <= now_)
            gw.state = GatewayOpState::Operational;
    }
    if (!pending_.active) return;
    bool drained = true;
    for (int id : pending_.plan.deactivate)
        if (!gateway_empty(gateways_[id])) drained = false;
    if (drained)
        execute_retune();
    else if (now_ - pending_.plan.cycle >= cfg_.drain_timeout_cycles)
        abort_plan();
}

void Engine::process_boundary() {
    // Interval snapshot happens before the controller mutates its counts.
    std::vector<int> g_vec(topo_.num_chiplets);
    for (int c = 0; c < topo_.num_chiplets; ++c) g_vec[c] = controller_.active_count(c);
    std::vector<int> wl;
    for (int g = 0; g < topo_.num_chiplets * topo_.gateways_per_chiplet; ++g)
        wl.push_back(gateways_[g].wavelengths);
    metrics_.finalize_interval(now_, g_vec, controller_.total_active(),
                               controller_.current_loads(), wl, 1.0 / cfg_.noc_freq_ghz);

    if (gateway_dynamics_) {
        bool in_flight = pending_.active;
        for (const auto& gw : gateways_)
            if (gw.state == GatewayOpState::Activating || gw.state == GatewayOpState::Draining)
                in_flight = true;
        ReconfigurationPlan plan = controller_.end_of_interval(now_, in_flight);
        if (plan.deferred) {
            ReconfigEvent ev;
            ev.cycle = now_;
            ev.deferred = true;
            metrics_.add_reconfig_event(ev);
        } else if (!plan.empty()) {
            std::vector<int> after(topo_.num_chiplets);
            for (int c = 0; c < topo_.num_chiplets; ++c) after[c] = controller_.active_count(c);
            start_plan(plan, g_vec, after);
        }
    } else {
        controller_.end_of_interval(now_, /*plan_in_flight=*/true);  // counters reset only
    }

    if (wdm_dynamics_) {
        Thresholds th;
        th.l_m = cfg_.per_wavelength_lmax();
        bool changed = false;
        for (int c = 0; c < topo_.num_chiplets; ++c) {
            for (int i = 0; i < topo_.gateways_per_chiplet; ++i) {
                GatewayUnit& gw = gateways_[topo_.chiplet_gateway_id(c, i)];
                double per_lambda = static_cast<double>(sends_per_gateway_[gw.info.id]) /
                                    (static_cast<double>(cfg_.interval_cycles) * gw.wavelengths);
                int next = gw.wavelengths;
                if (per_lambda > th.t_p(gw.wavelengths) && gw.wavelengths < cfg_.wavelengths)
                    next = gw.wavelengths + 1;
                else if (per_lambda < th.t_n(gw.wavelengths) &&
                         gw.wavelengths > cfg_.wdm_min_wavelengths)
                    next = gw.wavelengths - 1;
                if (next != gw.wavelengths) {
                    gw.wavelengths = next;
                    changed = true;
                }
            }
        }
        if (changed) {
            photonics_.laser.busy_until = now_ + 1;
            note_power_change();
        }
    }

    for (auto& s : sends_per_gateway_) s = 0;
    next_boundary_ += cfg_.interval_cycles;
}

void Engine::finish_run() {
    if (now_ <= warmup_end_) return;
    uint64_t last = next_boundary_ - cfg_.interval_cycles;
    if (now_ > last) {
        next_boundary_ = now_ + cfg_.interval_cycles;  // guards double finalize
        std::vector<int> g_vec(topo_.num_chiplets);
        for (int c = 0; c < topo_.num_chiplets; ++c) g_vec[c] = controller_.active_count(c);
        std::vector<int> wl;
        for (int g = 0; g < topo_.num_chiplets * topo_.gateways_per_chiplet; ++g)
            wl.push_back(gateways_[g].wavelengths);
        std::vector<double> loads(topo_.num_chiplets);
        for (int c = 0; c < topo_.num_chiplets; ++c)
            loads[c] = gateway_load(controller_.packets_sent(c), now_ - last,
                                    controller_.active_count(c));
        metrics_.finalize_interval(now_, g_vec, controller_.total_active(), loads, wl,
                                   1.0 / cfg_.noc_freq_ghz);
    }
}

// --- optical channel ---------------------------------------------------------

void Engine::try_start_serialization(GatewayUnit& g) {
    if (g.serializing || !gateway_can_transmit(g)) return;
    if (static_cast<int>(g.ingress.size()) < cfg_.packet_flits) return;
    assert(g.ingress.front().kind == FlitKind::Head);

    int dest = resolve_dest_gateway(g.ingress.front().dst_node);
    if (gateways_[dest].state != GatewayOpState::Operational)
        throw std::logic_error("optical transmit toward an inactive reader gateway");

    bool count_residency = !g.info.is_memory && now_ >= warmup_end_;
    int gw_node = g.info.is_memory ? -1 : topo_.node_id(g.info.router);
    g.ser_packet.flits.clear();
    for (int f = 0; f < cfg_.packet_flits; ++f) {
        if (count_residency)
            residency_.record(gw_node, now_ - g.ingress.front().enter_cycle);
        g.ser_packet.flits.push_back(g.ingress.front());
        g.ingress.pop_front();
    }
    g.ser_packet.dest_gateway = dest;
    int ser = wdm_dynamics_ ? optical_transmit_latency_cycles(cfg_.packet_bits(), g.wavelengths,
                                                              cfg_.datarate_gbps,
                                                              cfg_.noc_freq_ghz)
                            : ser_latency_uniform_;
    g.serializing = true;
    g.ser_done_at = now_ + ser;
    gateways_[dest].inbound_in_flight += 1;

    // Transmission counters drive the controller's load estimate.
    if (!g.info.is_memory) controller_.count_packet(g.info.chiplet);
    sends_per_gateway_[g.info.id] += 1;

    // Ingress space frees for the next packet while this one serializes.
    if (g.info.is_memory)
        credit_returns_.insert(credit_returns_.end(), cfg_.packet_flits, &g.ingress_credits);
    else {
        Router& rt = router(g.info.router.chiplet, topo_.router_index(g.info.router.row,
                                                                     g.info.router.col));
        credit_returns_.insert(credit_returns_.end(), cfg_.packet_flits,
                               &rt.out[kPortGateway].credits);
    }
}

void Engine::eject_reader_flit(GatewayUnit& g) {
    if (g.state == GatewayOpState::Off || g.state == GatewayOpState::Activating) return;
    int src = g.streaming_src;
    if (src < 0) {
        int n = static_cast<int>(gateways_.size());
        for (int k = 0; k < n; ++k) {
            int cand = (g.reader_rr + k) % n;
            if (!g.reader_queues[cand].empty()) {
                src = cand;
                break;
            }
        }
        if (src < 0) return;
    }
    std::deque<Flit>& q = g.reader_queues[src];
    assert(!q.empty());
    Flit flit = q.front();
    if (g.info.is_memory) {
        q.pop_front();
        deliver_flit(flit);
    } else {
        if (g.eject_credits <= 0) {
            g.streaming_src = src;
            return;
        }
        q.pop_front();
        --g.eject_credits;
        Staged st;
        st.chiplet = g.info.router.chiplet;
        st.router = topo_.router_index(g.info.router.row, g.info.router.col);
        st.port = kPortGateway;
        st.commit_at = now_ + kPipelineDepth - 1;
        st.flit = flit;
        staging_.push_back(st);
    }
    g.streaming_src = flit.kind == FlitKind::Tail ? -1 : src;
    if (flit.kind == FlitKind::Tail) g.reader_rr = src + 1 == static_cast<int>(gateways_.size())
                                                      ? 0
                                                      : src + 1;
}

void Engine::optical_phase() {
    // Completions and arrivals first so zero-propagation setups still land
    // the same cycle the serializer finishes.
    for (auto& g : gateways_) {
        if (g.serializing && g.ser_done_at <= now_) {
            g.serializing = false;
            g.ser_packet.arrive_at = now_ + cfg_.optical_prop_cycles;
            g.in_flight.push_back(std::move(g.ser_packet));
            g.ser_packet = OpticalPacket{};
        }
        while (!g.in_flight.empty() && g.in_flight.front().arrive_at <= now_) {
            OpticalPacket pkt = std::move(g.in_flight.front());
            g.in_flight.pop_front();
            GatewayUnit& dest = gateways_[pkt.dest_gateway];
            dest.inbound_in_flight -= 1;
            for (Flit& f : pkt.flits) dest.reader_queues[g.info.id].push_back(f);
        }
    }
    for (auto& g : gateways_) {
        try_start_serialization(g);
        eject_reader_flit(g);
    }
}

// --- electronic mesh ---------------------------------------------------------

void Engine::router_phase() {
    int rpc = topo_.routers_per_chiplet();
    for (int c = 0; c < topo_.num_chiplets; ++c) {
        for (int r = 0; r < rpc; ++r) {
            Router& rt = routers_[c][r];
            int row = r / topo_.mesh_cols, col = r % topo_.mesh_cols;

            for (int i = 0; i < kPortCount; ++i) {
                InputPort& in = rt.in[i];
                if (in.buffer.empty() || in.locked_output != -1) {
                    in.route = -1;
                    continue;
                }
                assert(in.buffer.front().kind == FlitKind::Head);
                in.route = compute_route(in.buffer.front(), c, r);
            }

            for (int o = 0; o < kPortCount; ++o) {
                OutputPort& out = rt.out[o];
                int i = out.locked_input;
                if (i == -1) {
                    for (int k = 0; k < kPortCount; ++k) {
                        int cand = (out.rr + k) % kPortCount;
                        InputPort& cin = rt.in[cand];
                        if (!cin.buffer.empty() && cin.locked_output == -1 && cin.route == o) {
                            if (o == kPortGateway && !gateway_accepting(rt.gateway_id)) continue;
                            i = cand;
                            break;
                        }
                    }
                    if (i != -1) {
                        out.locked_input = i;
                        rt.in[i].locked_output = o;
                        out.rr = (i + 1) % kPortCount;
                    }
                }
                if (i == -1) continue;
                InputPort& cin = rt.in[i];
                if (cin.buffer.empty()) continue;  // wormhole bubble

                bool can_send = true;
                if (o != kPortLocal && out.credits <= 0) can_send = false;
                if (!can_send) continue;

                Flit flit = cin.buffer.front();
                cin.buffer.pop_front();
                int node = topo_.node_id({c, row, col});
                // The gateway port buffer belongs to this router; flits bound
                // for it keep accumulating residency until serialization.
                if (o != kPortGateway && now_ >= warmup_end_)
                    residency_.record(node, now_ - flit.enter_cycle);

                if (o == kPortLocal) {
                    deliver_flit(flit);
                } else if (o == kPortGateway) {
                    --out.credits;
                    GatewayUnit& gw = gateways_[rt.gateway_id];
                    ++gw.staged_ingress;
                    Staged st;
                    st.to_ingress = true;
                    st.gateway = rt.gateway_id;
                    st.commit_at = now_ + kPipelineDepth - 1;
                    st.flit = flit;
                    staging_.push_back(st);
                } else {
                    --out.credits;
                    int nrow = row + (o == kPortSouth) - (o == kPortNorth);
                    int ncol = col + (o == kPortEast) - (o == kPortWest);
                    Staged st;
                    st.chiplet = c;
                    st.router = topo_.router_index(nrow, ncol);
                    st.port = o == kPortNorth   ? kPortSouth
                              : o == kPortSouth ? kPortNorth
                              : o == kPortEast  ? kPortWest
                                                : kPortEast;
                    st.commit_at = now_ + kPipelineDepth - 1;
                    st.flit = flit;
                    staging_.push_back(st);
                }

                // Space freed in this input: credit flows back upstream.
                if (i == kPortLocal)
                    credit_returns_.push_back(&inject_credits_[node]);
                else if (i == kPortGateway)
                    credit_returns_.push_back(&gateways_[rt.gateway_id].eject_credits);
                else {
                    int urow = row + (i == kPortSouth) - (i == kPortNorth);
                    int ucol = col + (i == kPortEast) - (i == kPortWest);
                    int uout = i == kPortNorth   ? kPortSouth
                               : i == kPortSouth ? kPortNorth
                               : i == kPortEast  ? kPortWest
                                                 : kPortEast;
                    credit_returns_.push_back(
                        &routers_[c][topo_.router_index(urow, ucol)].out[uout].credits);
                }

                if (flit.kind == FlitKind::Tail) {
                    out.locked_input = -1;
                    cin.locked_output = -1;
                }
            }
        }
    }
}

void Engine::injection_phase() {
    int cores = topo_.core_node_count();
    for (int node = 0; node < cores; ++node) {
        if (inject_queues_[node].empty() || inject_credits_[node] <= 0) continue;
        RouterCoord rc = topo_.coord_of(node);
        --inject_credits_[node];
        Staged st;
        st.chiplet = rc.chiplet;
        st.router = topo_.router_index(rc.row, rc.col);
        st.port = kPortLocal;
        st.commit_at = now_ + kPipelineDepth - 1;
        st.flit = inject_queues_[node].front();
        inject_queues_[node].pop_front();
        staging_.push_back(st);
    }
    for (int m = 0; m < topo_.mem_gateway_count; ++m) {
        int node = cores + m;
        GatewayUnit& gw = gateways_[topo_.memory_gateway_id(m)];
        if (inject_queues_[node].empty() || gw.ingress_credits <= 0) continue;
        --gw.ingress_credits;
        ++gw.staged_ingress;
        Staged st;
        st.to_ingress = true;
        st.gateway = gw.info.id;
        st.commit_at = now_ + kPipelineDepth - 1;
        st.flit = inject_queues_[node].front();
        inject_queues_[node].pop_front();
        staging_.push_back(st);
    }
}

void Engine::generation_phase() {
    if (!traffic_) return;
    for (const Injection& inj : traffic_->next_injections(now_))
        inject_packet(inj.src_node, inj.dst_node, inj.payload_bits);
}

void Engine::commit_phase() {
    size_t keep = 0;
    for (size_t k = 0; k < staging_.size(); ++k) {
        Staged& st = staging_[k];
        if (st.commit_at > now_) {
            staging_[keep++] = std::move(st);
            continue;
        }
        if (st.to_ingress) {
            // keep enter_cycle from the router input so the gateway-port
            // stint accrues to the gateway router's residency in one piece
            GatewayUnit& gw = gateways_[st.gateway];
            --gw.staged_ingress;
            gw.ingress.push_back(st.flit);
        } else {
            st.flit.enter_cycle = now_;
            routers_[st.chiplet][st.router].in[st.port].buffer.push_back(st.flit);
        }
    }
    staging_.resize(keep);
    for (int* counter : credit_returns_) ++*counter;
    credit_returns_.clear();
}

void Engine::step() {
    if (now_ == next_boundary_ && now_ > warmup_end_) process_boundary();
    progress_reconfiguration();
    optical_phase();
    router_phase();
    injection_phase();
    generation_phase();
    commit_phase();
    ++now_;
}

uint64_t Engine::in_flight_flits() const {
    uint64_t count = 0;
    for (const auto& q : inject_queues_) count += q.size();
    for (const auto& chip : routers_)
        for (const auto& rt : chip)
            for (const auto& in : rt.in) count += in.buffer.size();
    count += staging_.size();
    for (const auto& g : gateways_) {
        count += g.ingress.size();
        if (g.serializing) count += g.ser_packet.flits.size();
        for (const auto& pkt : g.in_flight) count += pkt.flits.size();
        for (const auto& q : g.reader_queues) count += q.size();
    }
    return count;
}

}  // namespace resipi
