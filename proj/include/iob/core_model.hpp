#pragma once

#include <optional>
#include <string>

namespace iob {

/// Per-bit sensing energy as a function of data rate.
///
/// Two modes share one evaluation rule, eta(R) = max(floor, 10^(m*log10(R)+c)):
///  - Fitted: (m, c) come from a log-log regression over surveyed front ends.
///  - Plateau: a rate-independent floor (m = 0, c = log10(floor)), used by the
///    built-in presets.
///
/// All quantities are strict SI: J/bit and bits/s.
struct EfficiencyModel {
    enum class Mode { fitted, plateau };

    Mode mode = Mode::plateau;
    double slope_m = 0.0;       // slope of log10(eta) vs log10(rate)
    double intercept_c = 0.0;   // log10(J/bit) at 1 bit/s
    double plateau_floor = 0.0; // J/bit, lower clamp
    double valid_rate_min = 0.0; // bits/s
    double valid_rate_max = 0.0; // bits/s

    static EfficiencyModel fitted(double slope_m, double intercept_c,
                                  double plateau_floor, double rate_min,
                                  double rate_max);
    static EfficiencyModel plateau(double floor, double rate_min, double rate_max);

    // Throws DomainError on invariant violation.
    void validate() const;

    // node_power is non-monotone in the fit region when slope_m <= -1;
    // feasibility solvers fall back to grid scan for such models.
    bool power_monotone() const { return mode == Mode::plateau || slope_m > -1.0; }
};

/// Communication link abstracted to a constant per-bit energy cost.
struct CommProtocol {
    std::string name;
    double energy_per_bit = 0.0; // J/bit
    double max_rate = 0.0;       // bits/s
    std::string range_note;      // informational only

    void validate() const;
};

/// Ideal energy reservoir; capacity in mAh at the boundary, joules internally.
struct Battery {
    double capacity_mah = 0.0;
    double nominal_voltage = 0.0; // V

    void validate() const;
};

/// Realistic indoor harvest power range [p_min, p_max] in watts.
struct HarvestBand {
    double p_min = 0.0;
    double p_max = 0.0;

    void validate() const;
};

/// Full node description: sensing model, link, platform losses, energy sources.
struct NodeConfig {
    EfficiencyModel sensing;
    CommProtocol comm;
    double system_efficiency = 1.0; // fraction of drawn power reaching sensing+comm
    std::optional<Battery> battery;
    std::optional<HarvestBand> harvest;

    void validate() const;
};

struct LifetimeResult {
    bool perpetual = false;
    double seconds = 0.0; // meaningful only when !perpetual
};

/// eta_sensing(rate) = max(plateau_floor, 10^(m*log10(rate) + c)), J/bit.
double sensing_efficiency(double rate_bps, const EfficiencyModel& model);

/// bits * (eta_sensing + eta_comm), J.
double total_energy(double bits_sensed, double eta_sensing, double eta_comm);

/// rate * (eta_sensing(rate) + eta_comm) / system_efficiency, W.
/// Throws CapabilityError when rate exceeds the protocol's max rate.
double node_power(double rate_bps, const NodeConfig& config);

/// capacity_mAh * voltage * 3.6, J.
double battery_energy(const Battery& battery);

/// Net-drain lifetime: perpetual when harvest covers the load, otherwise
/// battery_energy / (load - harvest).
LifetimeResult lifetime(const Battery& battery, double load_power_w,
                        double harvest_power_w);

}  // namespace iob
