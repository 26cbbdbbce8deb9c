#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "iob/core_model.hpp"

namespace iob {

/// Piecewise-constant harvest power over time, left-closed at each breakpoint.
/// With a period set, the breakpoint pattern repeats cyclically; otherwise the
/// last power level holds forever.
class HarvestProfile {
public:
    static HarvestProfile constant(double power_w);
    static HarvestProfile stepwise(std::vector<std::pair<double, double>> breakpoints,
                                   std::optional<double> period_s = std::nullopt);
    /// CSV `time_s,power_w`, '#' lines ignored, first time must be 0.
    static HarvestProfile from_csv(std::istream& in,
                                   std::optional<double> period_s = std::nullopt);

    double power_at(double t) const;
    std::optional<double> period() const { return period_; }
    bool is_constant() const { return breakpoints_.size() == 1; }

private:
    std::vector<std::pair<double, double>> breakpoints_; // (start time s, W)
    std::optional<double> period_;
};

enum class SimTerminal { depleted, survived, steady_state_perpetual };

struct SimTrace {
    double dt = 0.0;
    std::vector<double> samples; // stored energy J, samples[k] = E(k*dt)
    SimTerminal terminal = SimTerminal::survived;
    double terminal_time = 0.0; // depletion time, or the horizon reached

    void write_csv(std::ostream& out) const;
};

/// Forward-Euler battery state recurrence from full charge:
///   E(t+dt) = clamp(E(t) + (P_h(t) - P_load) * dt, 0, E_cap).
/// Terminal is depleted at the first step reaching 0, steady-state-perpetual
/// when a full profile period starting clamped at capacity has non-negative
/// net energy, else survived(horizon).
SimTrace simulate(const NodeConfig& config, double rate_bps,
                  const HarvestProfile& profile, double dt, double horizon);

/// Horizon-free wrapper for constant harvest: runs the same recurrence until
/// depletion or perpetual detection.
LifetimeResult sim_lifetime(const NodeConfig& config, double rate_bps,
                            double constant_harvest_w, double dt);

}  // namespace iob
