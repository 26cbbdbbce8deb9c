#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "iob/core_model.hpp"

namespace iob {

enum class GridSpacing { log, linear };

/// Power (and optionally lifetime) series over a shared rate grid.
/// A NaN entry marks a rate the protocol cannot carry.
struct SweepResult {
    Eigen::ArrayXd rates;                 // bits/s, strictly increasing
    std::vector<Eigen::ArrayXd> power;    // W, one series per config
    std::vector<Eigen::ArrayXd> lifetime; // s, same shape; empty when no battery
    std::vector<std::string> labels;

    void write_csv(std::ostream& out) const;
};

struct PerpetualRate {
    bool feasible = false;    // false: power exceeds harvest already at rate_min
    double rate_bps = 0.0;
    double harvest_w = 0.0;
    std::string method;       // "bisection" or "scan"
    bool range_clamped = false; // true when the answer is the valid-range edge
};

struct LifetimeComparison {
    LifetimeResult a;
    LifetimeResult b;
    std::optional<double> ratio; // b/a; empty when either side is perpetual
};

enum class WorkloadClass { perpetual_worst_case, perpetual, battery_limited };

struct WorkloadVerdict {
    std::string name;
    double rate_bps = 0.0;
    double power_w = 0.0;
    WorkloadClass classification = WorkloadClass::battery_limited;
    std::optional<double> lifetime_s; // at zero harvest, when battery-limited
};

Eigen::ArrayXd make_rate_grid(double rate_min, double rate_max, int n_points,
                              GridSpacing spacing);

/// Evaluates node_power per config over the grid; grid endpoints are exactly
/// rate_min/rate_max. Rates beyond a protocol's max become NaN markers, not
/// failures. Lifetime series are included for configs carrying a battery.
SweepResult power_sweep(const std::vector<NodeConfig>& configs, double rate_min,
                        double rate_max, int n_points, GridSpacing spacing);

/// Rate where the fitted log-log line meets the plateau floor,
/// R = 10^((log10(floor) - c) / m). Requires slope_m < 0. When the crossing
/// falls outside the valid range the clamped boundary is returned and
/// *clamped is set.
double knee_rate(const EfficiencyModel& model, bool* clamped = nullptr);

/// Largest rate in the model's valid range with node_power <= harvest_power.
/// Bisection (with a final secant polish, exact for plateau sensing) when power
/// is monotone in rate; 1e4-point log grid scan otherwise. Relative tolerance
/// 1e-6 on rate.
PerpetualRate max_perpetual_rate(const NodeConfig& config, double harvest_power_w);

/// Lifetimes of both configs at the given rate with zero harvest, plus ratio b/a.
LifetimeComparison compare_lifetime(const NodeConfig& config_a,
                                    const NodeConfig& config_b, double rate_bps);

/// Parses a workload table CSV `name,rate_bps,notes`; '#' lines ignored.
/// Non-positive or unparsable rates are rejected with their row number.
std::vector<std::pair<std::string, double>> load_workloads(std::istream& in);

/// Classifies each (name, rate) workload against the harvest band:
/// perpetual-worst-case when power <= p_min, perpetual when <= p_max, else
/// battery-limited with the zero-harvest lifetime.
std::vector<WorkloadVerdict> classify_workloads(
    const NodeConfig& config,
    const std::vector<std::pair<std::string, double>>& workloads,
    const HarvestBand& band);

}  // namespace iob
