#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "iob/config_io.hpp"
#include "iob/errors.hpp"
#include "iob/simkernel.hpp"
#include "oracles.hpp"

using namespace iob;

namespace {

// fixed per-bit load so node_power(rate) is easy to steer
NodeConfig sim_config(double comm_eta, double mah = 1000.0) {
    NodeConfig cfg;
    cfg.sensing = EfficiencyModel::plateau(0.7e-9, 1.0, 1e12);
    cfg.comm = {"sim", comm_eta, 1e12, ""};
    cfg.system_efficiency = 0.4;
    cfg.battery = Battery{mah, 3.0};
    return cfg;
}

}  // namespace

TEST_CASE("harvest profile construction and lookup") {
    auto flat = HarvestProfile::constant(2e-3);
    CHECK(flat.power_at(0.0) == 2e-3);
    CHECK(flat.power_at(1e9) == 2e-3);
    CHECK(flat.is_constant());

    auto steps = HarvestProfile::stepwise({{0.0, 0.0}, {100.0, 4e-3}}, 200.0);
    CHECK(steps.power_at(0.0) == 0.0);
    CHECK(steps.power_at(99.9) == 0.0);
    CHECK(steps.power_at(100.0) == 4e-3); // left-closed
    CHECK(steps.power_at(350.0) == 4e-3); // wrapped into the second phase
    CHECK(steps.power_at(250.0) == 0.0);  // wrapped into the first phase

    CHECK_THROWS_AS(HarvestProfile::stepwise({{1.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(HarvestProfile::stepwise({{0.0, -1.0}}), DomainError);
    CHECK_THROWS_AS(HarvestProfile::stepwise({{0.0, 0.0}, {0.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(HarvestProfile::stepwise({{0.0, 0.0}, {100.0, 1.0}}, 50.0),
                    DomainError);
}

TEST_CASE("harvest profile CSV parsing") {
    std::istringstream good("time_s,power_w\n0,0\n100,4e-3\n");
    auto profile = HarvestProfile::from_csv(good);
    CHECK(profile.power_at(150.0) == 4e-3);

    std::istringstream bad_first("time_s,power_w\n10,0\n");
    CHECK_THROWS_AS(HarvestProfile::from_csv(bad_first), IngestError);
    std::istringstream bad_num("time_s,power_w\n0,abc\n");
    try {
        HarvestProfile::from_csv(bad_num);
        FAIL("expected IngestError");
    } catch (const IngestError& e) {
        CHECK(e.row() == 1);
    }
}

TEST_CASE("simulate brackets the closed-form lifetime") {
    // 2.0 mW load (wir at 1 Mbps), 10800 J, dt = 60 s
    auto cfg = sim_config(0.1e-9);
    auto trace = simulate(cfg, 1e6, HarvestProfile::constant(0.0), 60.0, 6e6);
    CHECK(trace.terminal == SimTerminal::depleted);
    CHECK(trace.terminal_time >= 5.4e6 - 60.0);
    CHECK(trace.terminal_time <= 5.4e6 + 60.0);
}

TEST_CASE("simulate with harvest equal to load holds full charge") {
    auto cfg = sim_config(0.1e-9);
    double load = node_power(1e6, cfg);
    auto trace = simulate(cfg, 1e6, HarvestProfile::constant(load), 1.0, 100.0);
    CHECK(trace.terminal == SimTerminal::survived);
    for (double e : trace.samples) {
        CHECK(e == battery_energy(*cfg.battery));
    }
}

TEST_CASE("square-wave harvest is steady-state perpetual") {
    auto cfg = sim_config(0.1e-9, 1.0); // small battery, 10.8 J
    double load = node_power(1e6, cfg); // 2.0 mW
    auto profile =
        HarvestProfile::stepwise({{0.0, 0.0}, {100.0, 2.0 * load}}, 200.0);
    auto trace = simulate(cfg, 1e6, profile, 1.0, 1e4);
    CHECK(trace.terminal == SimTerminal::steady_state_perpetual);
    CHECK(trace.terminal_time == doctest::Approx(200.0));
}

TEST_CASE("simulate parameter and config validation") {
    auto cfg = sim_config(0.1e-9);
    auto flat = HarvestProfile::constant(0.0);
    CHECK_THROWS_AS(simulate(cfg, 1e6, flat, 0.0, 100.0), DomainError);
    CHECK_THROWS_AS(simulate(cfg, 1e6, flat, 100.0, 100.0), DomainError);
    auto no_battery = cfg;
    no_battery.battery.reset();
    CHECK_THROWS_AS(simulate(no_battery, 1e6, flat, 1.0, 100.0), DomainError);
}

TEST_CASE("energy conservation without clamping") {
    auto cfg = sim_config(0.1e-9);
    double load = node_power(1e6, cfg);
    double harvest = 0.5e-3;
    auto trace = simulate(cfg, 1e6, HarvestProfile::constant(harvest), 10.0, 1e4);
    double e0 = trace.samples.front();
    for (std::size_t k = 1; k < trace.samples.size(); ++k) {
        double expected = (harvest - load) * 10.0 * static_cast<double>(k);
        CHECK(e0 - trace.samples[k] == doctest::Approx(-expected).epsilon(1e-9));
    }
}

TEST_CASE("samples stay inside [0, capacity]") {
    auto cfg = sim_config(0.1e-9, 1.0);
    double load = node_power(1e6, cfg);
    auto profile = HarvestProfile::stepwise({{0.0, 0.0}, {50.0, 5.0 * load}}, 500.0);
    auto trace = simulate(cfg, 1e6, profile, 1.0, 2e3);
    double cap = battery_energy(*cfg.battery);
    for (double e : trace.samples) {
        CHECK(e >= 0.0);
        CHECK(e <= cap);
    }
}

TEST_CASE("halving dt keeps the depletion bracket ordered") {
    auto cfg = sim_config(15e-9);
    double closed = oracles::closed_form_lifetime(
        battery_energy(*cfg.battery), node_power(1e6, cfg), 0.0);
    double t_coarse =
        simulate(cfg, 1e6, HarvestProfile::constant(0.0), 64.0, 4e5).terminal_time;
    double t_fine =
        simulate(cfg, 1e6, HarvestProfile::constant(0.0), 32.0, 4e5).terminal_time;
    CHECK(t_fine <= t_coarse);
    CHECK(t_coarse >= closed);
    CHECK(t_fine >= closed);
    CHECK(t_coarse <= closed + 64.0);
    CHECK(t_fine <= closed + 32.0);
}

TEST_CASE("sim_lifetime matches the closed form") {
    auto cfg = sim_config(15e-9); // bluetooth-class: 39.25 mW at 1 Mbps
    auto life = sim_lifetime(cfg, 1e6, 0.0, 1.0);
    REQUIRE_FALSE(life.perpetual);
    CHECK(std::abs(life.seconds - 275159.236) <= 1.0);

    CHECK(sim_lifetime(cfg, 1e6, 1.0, 1.0).perpetual); // harvest > load
}

TEST_CASE("sim_lifetime oracle equivalence over random scenarios") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> mah(1.0, 200.0);
    std::uniform_real_distribution<double> lograte(3.0, 7.0);
    std::uniform_real_distribution<double> frac(0.0, 0.9);
    for (int i = 0; i < 25; ++i) {
        auto cfg = sim_config(15e-9, mah(rng));
        double rate = std::pow(10.0, lograte(rng));
        double load = node_power(rate, cfg);
        double harvest = load * frac(rng);
        double closed = oracles::closed_form_lifetime(
            battery_energy(*cfg.battery), load, harvest);
        // non-integer step count keeps the depletion step away from the
        // bracket edge
        double dt = closed / 500.7;
        auto life = sim_lifetime(cfg, rate, harvest, dt);
        REQUIRE_FALSE(life.perpetual);
        CHECK(std::abs(life.seconds - closed) <= dt);
    }
}
