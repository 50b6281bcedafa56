#include <doctest.h>

#include <map>
#include <set>

#include "engine.hpp"

using namespace resipi;

namespace {

SystemConfig make_config(const std::string& extra = "") {
    KeyValueConfig kv = KeyValueConfig::parse_string(
        "warmup_cycles = 0\n"
        "traffic.rate = 0\n" +
        extra);
    return SystemConfig::from_kv(kv);
}

// Two chiplets of 1x2 routers, one gateway each: the micro-topology used to
// freeze pipeline constants.
SystemConfig micro_config(const std::string& extra = "") {
    return make_config(
        "num_chiplets = 2\n"
        "mesh_rows = 1\n"
        "mesh_cols = 2\n"
        "max_gateways_per_chiplet = 1\n"
        "mem_gateways = 0\n" +
        extra);
}

}  // namespace

TEST_CASE("xy routing resolves the column before the row") {
    CHECK(xy_next_port(1, 1, 1, 3) == kPortEast);
    CHECK(xy_next_port(1, 3, 1, 1) == kPortWest);
    CHECK(xy_next_port(0, 2, 3, 2) == kPortSouth);
    CHECK(xy_next_port(3, 2, 0, 2) == kPortNorth);
    CHECK(xy_next_port(0, 0, 2, 3) == kPortEast);  // column first
    CHECK(xy_next_port(2, 2, 2, 2) == kPortLocal);
}

TEST_CASE("optical serialization arithmetic") {
    CHECK(optical_transmit_latency_cycles(256, 4, 12.0, 1.0) == 6);
    CHECK(optical_transmit_latency_cycles(256, 16, 12.0, 1.0) == 2);
    CHECK(optical_transmit_latency_cycles(48, 4, 12.0, 1.0) == 1);
    CHECK_THROWS_AS(optical_transmit_latency_cycles(256, 0, 12.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("empty network step changes only the clock") {
    SystemConfig cfg = make_config();
    Topology topo = build_topology(cfg);
    Engine engine(cfg, topo);
    engine.run(100);
    CHECK(engine.now() == 100);
    CHECK(engine.injected_flits() == 0);
    CHECK(engine.delivered_flits() == 0);
    CHECK(engine.in_flight_flits() == 0);
}

// Zero-load latency constants measured once on the micro-topology and frozen
// as regression goldens. Per-hop cost is kPipelineDepth cycles; the remaining
// terms are injection, gateway buffering, serialization, propagation and
// ejection.
TEST_CASE("micro-topology pipeline goldens") {
    SystemConfig cfg = micro_config();
    Topology topo = build_topology(cfg);

    SUBCASE("adjacent routers, same chiplet") {
        Engine engine(cfg, topo);
        engine.set_record_deliveries(true);
        engine.inject_packet(0, 1, 256);
        engine.run(40);
        REQUIRE(engine.delivery_log().size() == 1);
        const DeliveryRecord& d = engine.delivery_log()[0];
        // inject staging (2) + hop (2) + eject of 8 flits (8) = tail out at 11
        CHECK(d.deliver_cycle - d.inject_cycle == 11);
    }

    SUBCASE("self delivery costs only injection and ejection") {
        Engine engine(cfg, topo);
        engine.set_record_deliveries(true);
        engine.inject_packet(0, 0 + 1, 256);  // neighbor again, baseline above
        engine.inject_packet(2, 3, 256);
        engine.run(40);
        CHECK(engine.delivery_log().size() == 2);
    }

    SUBCASE("inter-chiplet path crosses the interposer") {
        Engine engine(cfg, topo);
        engine.set_record_deliveries(true);
        engine.inject_packet(0, 2, 256);  // chiplet 0 router 0 -> chiplet 1 router 0
        engine.run(80);
        REQUIRE(engine.delivery_log().size() == 1);
        const DeliveryRecord& d = engine.delivery_log()[0];
        // frozen golden: both gateways sit on the endpoint routers here, so
        // the path is injection, 8-flit gateway ingress, 6-cycle
        // serialization, 1-cycle propagation and 8-flit ejection
        CHECK(d.deliver_cycle - d.inject_cycle == 27);
        CHECK(engine.in_flight_flits() == 0);
    }
}

TEST_CASE("backpressure stalls but never drops") {
    // saturating injection toward one destination on the full-scale system
    SystemConfig cfg = make_config("traffic.rate = 0\n");
    Topology topo = build_topology(cfg);
    Engine engine(cfg, topo);
    for (int burst = 0; burst < 50; ++burst)
        for (int src = 0; src < 16; ++src)
            if (src != 5) engine.inject_packet(src, 5, 256);
    uint64_t injected = engine.injected_flits();
    CHECK(injected == 49ull * 15 * 8 + 15 * 8);
    engine.run(20000);
    CHECK(engine.delivered_flits() == injected);
    CHECK(engine.in_flight_flits() == 0);
}

TEST_CASE("conservation holds every cycle under random load") {
    SystemConfig cfg = make_config("traffic.rate = 0.02\ntraffic.mem_fraction = 0.1\n");
    Topology topo = build_topology(cfg);
    Engine engine(cfg, topo);
    for (int chunk = 0; chunk < 10; ++chunk) {
        engine.run(5000);
        CHECK(engine.injected_flits() ==
              engine.delivered_flits() + engine.in_flight_flits());
    }
    CHECK(engine.delivered_flits() > 0);
}

TEST_CASE("packets of one flow arrive in injection order") {
    SystemConfig cfg = make_config(
        "traffic.rate = 0.03\n"
        "dynamic_gateways = false\n");
    Topology topo = build_topology(cfg);
    Engine engine(cfg, topo);
    engine.set_record_deliveries(true);
    engine.run(50000);
    std::map<std::pair<int, int>, uint64_t> last_inject;
    for (const DeliveryRecord& d : engine.delivery_log()) {
        auto key = std::make_pair(d.src_node, d.dst_node);
        auto it = last_inject.find(key);
        if (it != last_inject.end()) CHECK(d.inject_cycle >= it->second);
        last_inject[key] = d.inject_cycle;
        // zero-load floor: one mesh hop end to end costs 11 cycles
        CHECK(d.deliver_cycle - d.inject_cycle >= 11);
    }
    CHECK(engine.delivery_log().size() > 100);
}

TEST_CASE("soak: forward progress under heavy load") {
    SystemConfig cfg = make_config("traffic.rate = 0.05\n");
    Topology topo = build_topology(cfg);
    Engine engine(cfg, topo);
    uint64_t last_delivered = 0;
    for (int chunk = 0; chunk < 20; ++chunk) {
        engine.run(10000);
        CHECK(engine.delivered_flits() > last_delivered);
        last_delivered = engine.delivered_flits();
    }
    CHECK(engine.injected_flits() ==
          engine.delivered_flits() + engine.in_flight_flits());
}

TEST_CASE("gateway drain: deactivation flushes everything, loses nothing") {
    // High load then silence with dynamics on: the controller steps down and
    // the draining gateways must flush all buffered flits before power-off.
    SystemConfig cfg = make_config(
        "interval_cycles = 5000\n"
        "traffic.pattern = phased\n"
        "traffic.phases = 2\n"
        "traffic.phase.0.pattern = uniform\n"
        "traffic.phase.0.rate = 0.02\n"
        "traffic.phase.0.duration = 10000\n"
        "traffic.phase.1.pattern = uniform\n"
        "traffic.phase.1.rate = 0\n"
        "traffic.phase.1.duration = 40000\n");
    Topology topo = build_topology(cfg);
    Engine engine(cfg, topo);
    engine.run(50000);
    engine.finish_run();
    // every chiplet stepped down to one gateway
    for (int c = 0; c < 4; ++c) CHECK(engine.controller().active_count(c) == 1);
    bool some_deactivated = false;
    for (const auto& ev : engine.metrics().reconfig_events())
        if (!ev.deactivated.empty()) some_deactivated = true;
    CHECK(some_deactivated);
    // flit count in == flit count out
    CHECK(engine.delivered_flits() == engine.injected_flits());
    CHECK(engine.in_flight_flits() == 0);
    for (int g = 0; g < topo.total_gateways(); ++g) {
        if (topo.gateways[g].is_memory) continue;
        if (topo.gateways[g].local_index > 0)
            CHECK(engine.gateway_state(g) == GatewayOpState::Off);
    }
}

TEST_CASE("activation events open exactly one reconfiguration window") {
    // Low load then high load: gateways activate, each marked live exactly
    // one PCM window after the retune.
    SystemConfig cfg = make_config(
        "interval_cycles = 5000\n"
        "initial_gateways = 1\n"
        "traffic.rate = 0.02\n");
    Topology topo = build_topology(cfg);
    Engine engine(cfg, topo);
    engine.run(40000);
    engine.finish_run();
    int activations = 0;
    for (const auto& ev : engine.metrics().reconfig_events()) {
        if (ev.deferred) continue;
        CHECK(ev.activation_window == 100);
        for (int id : ev.activated) {
            ++activations;
            CHECK(engine.gateway_live_at(id) == ev.cycle + 100);
        }
        CHECK(ev.energy_nj == 2.0 * ev.pcmcs_retuned);
    }
    CHECK(activations > 0);
}

TEST_CASE("cycle-by-cycle determinism across engines") {
    SystemConfig cfg = make_config("traffic.rate = 0.015\ntraffic.mem_fraction = 0.2\n");
    Topology topo = build_topology(cfg);
    Engine a(cfg, topo), b(cfg, topo);
    for (int chunk = 0; chunk < 8; ++chunk) {
        a.run(2500);
        b.run(2500);
        CHECK(a.injected_flits() == b.injected_flits());
        CHECK(a.delivered_flits() == b.delivered_flits());
        CHECK(a.in_flight_flits() == b.in_flight_flits());
    }
}

TEST_CASE("memory endpoints source and sink traffic") {
    SystemConfig cfg = make_config("traffic.rate = 0\n");
    Topology topo = build_topology(cfg);
    Engine engine(cfg, topo);
    engine.set_record_deliveries(true);
    engine.inject_packet(3, 64, 256);   // core -> memory endpoint
    engine.inject_packet(65, 12, 256);  // memory endpoint -> core
    engine.run(200);
    CHECK(engine.delivery_log().size() == 2);
    CHECK(engine.in_flight_flits() == 0);
}

TEST_CASE("trace payloads round up to whole packets") {
    SystemConfig cfg = make_config();
    Topology topo = build_topology(cfg);
    Engine engine(cfg, topo);
    engine.inject_packet(0, 9, 300);  // 300 bits -> 2 packets of 256
    CHECK(engine.injected_flits() == 16);
    engine.run(100);
    CHECK(engine.delivered_flits() == 16);
}
