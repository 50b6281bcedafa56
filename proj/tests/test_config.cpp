#include <doctest.h>

#include "config.hpp"

using namespace resipi;

TEST_CASE("key-value parsing") {
    KeyValueConfig kv = KeyValueConfig::parse_string(
        "# comment\n"
        "num_chiplets = 4\n"
        "l_m = 0.0152   # trailing comment\n"
        "\n"
        "traffic.pattern = uniform\n");
    CHECK(kv.get_int("num_chiplets", 0) == 4);
    CHECK(kv.get_double("l_m", 0) == 0.0152);
    CHECK(kv.get_str("traffic.pattern", "") == "uniform");
    CHECK(kv.get_int("missing", 7) == 7);
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_AS(KeyValueConfig::parse_string("foo bar\n"), ConfigError);
    try {
        KeyValueConfig kv = KeyValueConfig::parse_string("a = 1\nb = not_a_number\n");
        kv.get_int("b", 0);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("defaults build a valid desk-scale system") {
    SystemConfig c = SystemConfig::from_kv(KeyValueConfig::parse_string(""));
    CHECK(c.num_chiplets == 4);
    CHECK(c.mesh_rows == 4);
    CHECK(c.total_gateways() == 18);
    CHECK(c.packet_bits() == 256);
    CHECK(c.pcmc_reconfig_cycles() == 100);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("invariant violations are rejected with diagnostics") {
    CHECK_THROWS_AS(SystemConfig::from_kv(KeyValueConfig::parse_string("num_chiplets = 1\n")),
                    ConfigError);
    CHECK_THROWS_AS(SystemConfig::from_kv(KeyValueConfig::parse_string("interval_cycles = 10\n")),
                    ConfigError);
    // mesh too small for the gateway count
    CHECK_THROWS_AS(SystemConfig::from_kv(KeyValueConfig::parse_string(
                        "mesh_rows = 1\nmesh_cols = 2\nmax_gateways_per_chiplet = 3\n")),
                    ConfigError);
    // gateway buffer cannot hold a packet
    CHECK_THROWS_AS(
        SystemConfig::from_kv(KeyValueConfig::parse_string("gw_buffer_flits = 4\n")),
        ConfigError);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(SystemConfig::from_kv(KeyValueConfig::parse_string("num_chiplet = 4\n")),
                    ConfigError);
}

TEST_CASE("gateway placement keys parse") {
    SystemConfig c = SystemConfig::from_kv(
        KeyValueConfig::parse_string("gateway.0.0 = 2,3\ngateway.1.2 = 0,0\n"));
    REQUIRE(c.explicit_placements.size() == 2);
    CHECK(c.explicit_placements[0].chiplet == 0);
    CHECK(c.explicit_placements[0].row == 2);
    CHECK(c.explicit_placements[0].col == 3);
    CHECK_THROWS_AS(SystemConfig::from_kv(KeyValueConfig::parse_string("gateway.0.0 = 2\n")),
                    ConfigError);
}

TEST_CASE("preset expansion differs from base in exactly the documented keys") {
    SystemConfig base = load_config("", RunMode::ResipiDynamic, {});
    for (RunMode mode : {RunMode::StaticAll, RunMode::StaticMin, RunMode::WdmScaling}) {
        SystemConfig expanded = load_config("", mode, {});
        auto base_kv = base.to_kv();
        auto kv = expanded.to_kv();
        std::map<std::string, std::string> diff;
        for (const auto& [k, v] : kv)
            if (base_kv.at(k) != v) diff[k] = v;
        // overrides that happen to match a base default drop out of the diff
        std::map<std::string, std::string> expected_diff;
        for (const auto& [k, v] : preset_overrides(mode))
            if (base_kv.at(k) != v) expected_diff[k] = v;
        CHECK(diff == expected_diff);
    }
}

TEST_CASE("cli overrides stack on top of presets") {
    SystemConfig c = load_config("", RunMode::StaticMin, {{"cycles", "5000"}});
    CHECK(c.cycles == 5000);
    CHECK(c.initial_gateways == 1);
    CHECK_FALSE(c.dynamic_gateways);
}
