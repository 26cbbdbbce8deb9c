#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "iob/config_io.hpp"
#include "iob/errors.hpp"
#include "iob/feasibility.hpp"

using namespace iob;

namespace {

NodeConfig with_battery(NodeConfig cfg, double mah = 1000.0) {
    cfg.battery = Battery{mah, 3.0};
    return cfg;
}

}  // namespace

TEST_CASE("rate grids") {
    auto log_grid = make_rate_grid(1.0, 1e6, 7, GridSpacing::log);
    CHECK(log_grid(0) == 1.0);
    CHECK(log_grid(6) == 1e6);
    CHECK(log_grid(3) == doctest::Approx(1e3).epsilon(1e-12));
    auto lin_grid = make_rate_grid(10.0, 20.0, 3, GridSpacing::linear);
    CHECK(lin_grid(1) == doctest::Approx(15.0).epsilon(1e-12));
    CHECK_THROWS_AS(make_rate_grid(0.0, 1e3, 5, GridSpacing::log), DomainError);
    CHECK_THROWS_AS(make_rate_grid(1.0, 1e3, 1, GridSpacing::log), DomainError);
}

TEST_CASE("power_sweep hits the preset reference points") {
    auto sweep = power_sweep({preset("bluetooth"), preset("wir")}, 1.0, 1e6, 7,
                             GridSpacing::log);
    REQUIRE(sweep.labels.size() == 2);
    CHECK(sweep.power[0](6) == doctest::Approx(39.25e-3).epsilon(1e-12));
    CHECK(sweep.power[1](6) == doctest::Approx(2.0e-3).epsilon(1e-12));
}

TEST_CASE("power_sweep is linear on the plateau") {
    // per-bit constants on both sides: doubling the rate doubles the power
    auto sweep = power_sweep({preset("wir")}, 1e7, 2e7, 2, GridSpacing::linear);
    CHECK(sweep.power[0](1) == doctest::Approx(2.0 * sweep.power[0](0)).epsilon(1e-12));
}

TEST_CASE("power_sweep marks rates beyond the protocol instead of failing") {
    auto cfg = preset("bluetooth");
    cfg.comm.max_rate = 1e5;
    auto sweep = power_sweep({cfg}, 1e4, 1e6, 3, GridSpacing::log);
    CHECK_FALSE(std::isnan(sweep.power[0](0)));
    CHECK_FALSE(std::isnan(sweep.power[0](1)));
    CHECK(std::isnan(sweep.power[0](2)));

    std::ostringstream out;
    sweep.write_csv(out);
    CHECK(out.str().find("bluetooth_power_w") != std::string::npos);
}

TEST_CASE("sweep lifetime series is non-increasing in rate at zero harvest") {
    auto sweep = power_sweep({with_battery(preset("bluetooth"))}, 1.0, 1e8, 50,
                             GridSpacing::log);
    REQUIRE(sweep.lifetime[0].size() == 50);
    for (int i = 1; i < 50; ++i) {
        CHECK(sweep.lifetime[0](i) <= sweep.lifetime[0](i - 1));
    }
}

TEST_CASE("knee_rate") {
    auto model = EfficiencyModel::fitted(-0.5, std::log10(7e-7), 0.7e-9, 1.0, 1e12);
    CHECK(knee_rate(model) == doctest::Approx(1e6).epsilon(1e-9));

    // floor equal to the line value at valid_rate_min: knee at the boundary
    auto boundary = EfficiencyModel::fitted(-0.5, std::log10(7e-7), 7e-7, 1.0, 1e6);
    bool clamped = false;
    CHECK(knee_rate(boundary, &clamped) == doctest::Approx(1.0).epsilon(1e-9));

    auto rising = EfficiencyModel::fitted(0.1, -8.0, 1e-10, 1.0, 1e6);
    CHECK_THROWS_AS(knee_rate(rising), DomainError);

    // crossing outside the valid range reports the clamped boundary
    auto narrow = EfficiencyModel::fitted(-0.5, std::log10(7e-7), 0.7e-9, 1.0, 1e4);
    CHECK(knee_rate(narrow, &clamped) == 1e4);
    CHECK(clamped);
}

TEST_CASE("max_perpetual_rate closed-form cases") {
    auto wir = preset("wir");
    auto r400 = max_perpetual_rate(wir, 400e-6);
    CHECK(r400.feasible);
    CHECK(r400.method == "bisection");
    CHECK(r400.rate_bps == doctest::Approx(2.0e5).epsilon(1e-12));

    auto r100 = max_perpetual_rate(wir, 100e-6);
    CHECK(r100.rate_bps == doctest::Approx(5.0e4).epsilon(1e-12));

    auto bt = max_perpetual_rate(preset("bluetooth"), 100e-6);
    CHECK(bt.rate_bps == doctest::Approx(100e-6 * 0.4 / 15.7e-9).epsilon(1e-6));

    CHECK_THROWS_AS(max_perpetual_rate(wir, 0.0), DomainError);
}

TEST_CASE("max_perpetual_rate infeasible and clamped verdicts") {
    auto bt = preset("bluetooth");
    auto none = max_perpetual_rate(bt, 1e-9); // below power at rate_min
    CHECK_FALSE(none.feasible);

    auto huge = max_perpetual_rate(bt, 100.0); // whole range affordable
    CHECK(huge.feasible);
    CHECK(huge.range_clamped);
    CHECK(huge.rate_bps == bt.comm.max_rate);
}

TEST_CASE("max_perpetual_rate grid scan for non-monotone models") {
    NodeConfig cfg;
    cfg.sensing = EfficiencyModel::fitted(-1.4, -4.0, 1e-11, 1.0, 1e9);
    cfg.comm = {"x", 1e-12, 1e9, ""};
    cfg.system_efficiency = 0.4;
    REQUIRE_FALSE(cfg.sensing.power_monotone());

    auto result = max_perpetual_rate(cfg, 300e-6);
    CHECK(result.method == "scan");
    REQUIRE(result.feasible);
    CHECK(node_power(result.rate_bps, cfg) <= 300e-6);
    if (!result.range_clamped) {
        CHECK(node_power(result.rate_bps * (1.0 + 1e-3), cfg) > 300e-6);
    }
    // power first falls with rate here, so the crossing sits well above rate_min
    CHECK(result.rate_bps > 1e6);
}

TEST_CASE("max_perpetual_rate bracketing at the returned rate") {
    auto wir = preset("wir");
    auto result = max_perpetual_rate(wir, 400e-6);
    CHECK(node_power(result.rate_bps, wir) <= 400e-6);
    CHECK(node_power(result.rate_bps * (1.0 + 1e-3), wir) > 400e-6);
}

TEST_CASE("max_perpetual_rate monotone in harvest power") {
    auto wir = preset("wir");
    double prev = 0.0;
    for (double h = 10e-6; h <= 1000e-6; h += 10e-6) {
        auto r = max_perpetual_rate(wir, h);
        REQUIRE(r.feasible);
        CHECK(r.rate_bps >= prev);
        prev = r.rate_bps;
    }
}

TEST_CASE("compare_lifetime Fig-style cases") {
    auto bt = with_battery(preset("bluetooth"));
    auto wir = with_battery(preset("wir"));

    auto cmp = compare_lifetime(bt, wir, 1e6);
    CHECK(cmp.a.seconds / 3600.0 == doctest::Approx(76.43).epsilon(1e-3));
    CHECK(cmp.b.seconds / 3600.0 == doctest::Approx(1500.0).epsilon(1e-9));
    REQUIRE(cmp.ratio);
    CHECK(*cmp.ratio == doctest::Approx(19.625).epsilon(1e-9));

    auto same = compare_lifetime(bt, bt, 1e6);
    CHECK(*same.ratio == doctest::Approx(1.0).epsilon(1e-12));

    // raw video: 400 x 400 px, 10 fps, 8 bits
    auto video = compare_lifetime(bt, wir, 12.8e6);
    CHECK(video.a.seconds / 3600.0 == doctest::Approx(5.971).epsilon(1e-3));
    CHECK(video.b.seconds / 3600.0 == doctest::Approx(117.19).epsilon(1e-3));
    CHECK(*video.ratio == doctest::Approx(19.625).epsilon(1e-9));
}

TEST_CASE("compare_lifetime requires a shared battery") {
    auto bt = with_battery(preset("bluetooth"));
    CHECK_THROWS_AS(compare_lifetime(bt, preset("wir"), 1e6), DomainError);
    auto other = with_battery(preset("wir"), 200.0);
    CHECK_THROWS_AS(compare_lifetime(bt, other, 1e6), DomainError);
}

TEST_CASE("lifetime ratio is invariant to battery capacity") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> lograte(2.0, 7.0);
    for (int i = 0; i < 100; ++i) {
        double rate = std::pow(10.0, lograte(rng));
        auto r200 = compare_lifetime(with_battery(preset("bluetooth"), 200.0),
                                     with_battery(preset("wir"), 200.0), rate);
        auto r1000 = compare_lifetime(with_battery(preset("bluetooth"), 1000.0),
                                      with_battery(preset("wir"), 1000.0), rate);
        REQUIRE(r200.ratio);
        REQUIRE(r1000.ratio);
        CHECK(*r200.ratio == doctest::Approx(*r1000.ratio).epsilon(1e-9));
    }
}

TEST_CASE("classify_workloads") {
    HarvestBand band{50e-6, 400e-6};
    auto wir = with_battery(preset("wir"));
    auto verdicts = classify_workloads(wir, {{"ecg", 8e3}}, band);
    REQUIRE(verdicts.size() == 1);
    CHECK(verdicts[0].power_w == doctest::Approx(16e-6).epsilon(1e-12));
    CHECK(verdicts[0].classification == WorkloadClass::perpetual_worst_case);

    auto bt = with_battery(preset("bluetooth"));
    auto limited = classify_workloads(bt, {{"stream", 1e6}}, band);
    CHECK(limited[0].classification == WorkloadClass::battery_limited);
    REQUIRE(limited[0].lifetime_s);
    CHECK(*limited[0].lifetime_s / 3600.0 == doctest::Approx(76.43).epsilon(1e-3));

    CHECK_THROWS_AS(classify_workloads(wir, {{"zero", 0.0}}, band), DomainError);
}

TEST_CASE("bundled workload table") {
    std::ifstream in(std::string(IOB_DATA_DIR) + "/workloads.csv");
    REQUIRE(in.good());
    auto workloads = load_workloads(in);
    REQUIRE(workloads.size() == 5);
    CHECK(workloads[0].first == "ecg");
    CHECK(workloads[4].second == 12.8e6);

    std::istringstream bad("name,rate_bps,notes\nx,-5,\n");
    CHECK_THROWS_AS(load_workloads(bad), IngestError);
}
