#include <doctest.h>

#include <cstdint>
#include <stdexcept>

#include "controller.hpp"

using namespace resipi;

TEST_CASE("gateway load is the per-gateway packet rate") {
    CHECK(gateway_load(1520, 100000, 1) == 0.0152);
    CHECK(gateway_load(0, 100000, 3) == 0.0);
    CHECK(gateway_load(3040, 100000, 2) == 0.0152);
    CHECK_THROWS_AS(gateway_load(10, 1000, 0), std::invalid_argument);
    CHECK_THROWS_AS(gateway_load(10, 0, 1), std::invalid_argument);
}

TEST_CASE("threshold table matches the stated fractions bit-exactly") {
    double l_m = 0.0152;
    Thresholds th{l_m};
    CHECK(th.t_p(1) == l_m);
    CHECK(th.t_p(4) == l_m);
    CHECK(th.t_n(1) == 0.0);
    CHECK(th.t_n(2) == l_m / 2);
    CHECK(th.t_n(3) == 2 * l_m / 3);
    CHECK(th.t_n(4) == 3 * l_m / 4);
}

// Derivation identity: the load drop that justifies switching one gateway off,
// summed over the active gateways, is exactly one gateway's maximum load.
// Checked in exact rational arithmetic, independent of the fp implementation.
namespace {

struct Rational {
    int64_t num, den;
    Rational reduce() const {
        int64_t a = num < 0 ? -num : num, b = den;
        while (b) {
            int64_t t = a % b;
            a = b;
            b = t;
        }
        return {num / a, den / a};
    }
};

}  // namespace

TEST_CASE("derivation consistency: L_d * g == L_m in exact arithmetic") {
    // L_m = 152 / 10000 packets per cycle
    const int64_t lm_num = 152, lm_den = 10000;
    for (int64_t g = 1; g <= 8; ++g) {
        // T_N = L_m (g-1)/g; L_d = L_m - T_N = L_m / g
        Rational t_n = Rational{lm_num * (g - 1), lm_den * g}.reduce();
        Rational l_d = Rational{lm_num * g - t_n.num * (lm_den * g / t_n.den),
                                lm_den * g}.reduce();
        Rational product = Rational{l_d.num * g, l_d.den}.reduce();
        CHECK(product.num * lm_den == lm_num * product.den);
        // fp implementation tracks the exact value to an ulp
        Thresholds th{static_cast<double>(lm_num) / lm_den};
        double l_d_fp = th.l_m - th.t_n(static_cast<int>(g));
        CHECK(l_d_fp * g == doctest::Approx(th.l_m).epsilon(1e-14));
    }
}

TEST_CASE("update rule steps by one with strict comparisons") {
    double l_m = 0.0152;
    Thresholds th{l_m};
    CHECK(update_gateway_count(1.1 * l_m, 2, 4, th) == 3);
    CHECK(update_gateway_count(0.4 * l_m, 2, 4, th) == 1);  // 0.4 < t_n(2)/l_m = 0.5
    CHECK(update_gateway_count(1.1 * l_m, 4, 4, th) == 4);  // saturated at g_max
    CHECK(update_gateway_count(0.1 * l_m, 1, 4, th) == 1);  // floor at one gateway
    // boundary loads cause no change
    CHECK(update_gateway_count(th.t_p(2), 2, 4, th) == 2);
    CHECK(update_gateway_count(th.t_n(2), 2, 4, th) == 2);
}

TEST_CASE("mixed plan: two chiplets gain, two lose, GT unchanged") {
    ReconfigController ctl(4, 4, 2, 1, 100000, 0.0152);
    // start at g = {1,2,1,2}
    ctl.set_active(1, 2);
    ctl.set_active(3, 2);
    // offered loads {1.2, 0.3, 1.2, 0.3} x L_m per active gateway
    auto feed = [&](int chiplet, double per_gateway_load) {
        uint64_t pkts = static_cast<uint64_t>(per_gateway_load * 0.0152 * 100000 *
                                              ctl.active_count(chiplet));
        for (uint64_t i = 0; i < pkts; ++i) ctl.count_packet(chiplet);
    };
    feed(0, 1.2);
    feed(1, 0.3);
    feed(2, 1.2);
    feed(3, 0.3);
    ReconfigurationPlan plan = ctl.end_of_interval(100000, false);
    REQUIRE(plan.changes.size() == 4);
    CHECK(ctl.active_count(0) == 2);
    CHECK(ctl.active_count(1) == 1);
    CHECK(ctl.active_count(2) == 2);
    CHECK(ctl.active_count(3) == 1);
    CHECK(plan.gt_before == plan.gt_after);
    CHECK(plan.gt_after == 6 + 2);
    // activation order: lowest free index first; deactivation from the top
    CHECK(plan.activate == std::vector<int>{1, 9});    // chiplet0 G2, chiplet2 G2
    CHECK(plan.deactivate == std::vector<int>{5, 13});  // chiplet1 G2, chiplet3 G2
}

TEST_CASE("loads inside the band produce an empty plan") {
    ReconfigController ctl(2, 4, 0, 2, 10000, 0.0152);
    // per-gateway load between t_n(2) and t_p: 0.8 * L_m
    uint64_t pkts = static_cast<uint64_t>(0.8 * 0.0152 * 10000 * 2);
    for (uint64_t i = 0; i < pkts; ++i) ctl.count_packet(0), ctl.count_packet(1);
    ReconfigurationPlan plan = ctl.end_of_interval(10000, false);
    CHECK(plan.empty());
    CHECK_FALSE(plan.deferred);
}

TEST_CASE("deferred intervals keep counts and reset counters") {
    ReconfigController ctl(2, 4, 0, 2, 10000, 0.0152);
    for (int i = 0; i < 9999; ++i) ctl.count_packet(0);  // would trigger an increase
    ReconfigurationPlan plan = ctl.end_of_interval(10000, true);
    CHECK(plan.deferred);
    CHECK(plan.empty());
    CHECK(ctl.active_count(0) == 2);
    CHECK(ctl.packets_sent(0) == 0);
}

TEST_CASE("hysteresis: constant offered load causes at most one transition") {
    // Constant chiplet-wide load L with L/g0 slightly above L_m: one increase,
    // then the per-gateway load sits above t_n(g0+1) so the count holds.
    for (int g0 = 1; g0 <= 3; ++g0) {
        ReconfigController ctl(2, 4, 0, g0, 100000, 0.0152);
        double offered = 1.05 * 0.0152 * g0;  // packets per cycle, whole chiplet
        int transitions = 0;
        int last = g0;
        for (int interval = 0; interval < 25; ++interval) {
            uint64_t pkts = static_cast<uint64_t>(offered * 100000);
            for (uint64_t i = 0; i < pkts; ++i) ctl.count_packet(0);
            ctl.end_of_interval((interval + 1) * 100000, false);
            if (ctl.active_count(0) != last) {
                ++transitions;
                last = ctl.active_count(0);
            }
        }
        CHECK(transitions == 1);
        CHECK(last == g0 + 1);
    }
}

TEST_CASE("counts stay inside [1, G] and GT tracks the sum") {
    ReconfigController ctl(3, 4, 2, 4, 10000, 0.0152);
    for (int interval = 0; interval < 30; ++interval) {
        // alternate extreme loads
        if (interval % 2 == 0)
            for (int i = 0; i < 2000; ++i) ctl.count_packet(0);
        ctl.end_of_interval((interval + 1) * 10000, false);
        int sum = 2;
        for (int c = 0; c < 3; ++c) {
            CHECK(ctl.active_count(c) >= 1);
            CHECK(ctl.active_count(c) <= 4);
            sum += ctl.active_count(c);
        }
        CHECK(ctl.total_active() == sum);
    }
}

TEST_CASE("counter hygiene: packets accumulate within one interval only") {
    ReconfigController ctl(2, 2, 0, 1, 10000, 0.0152);
    for (int i = 0; i < 5; ++i) ctl.count_packet(1);
    CHECK(ctl.packets_sent(1) == 5);
    ctl.end_of_interval(10000, false);
    CHECK(ctl.packets_sent(1) == 0);
}
