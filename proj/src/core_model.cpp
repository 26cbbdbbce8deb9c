#include "iob/core_model.hpp"

#include <cmath>

#include "iob/errors.hpp"

namespace iob {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

}  // namespace

EfficiencyModel EfficiencyModel::fitted(double slope_m, double intercept_c,
                                        double plateau_floor, double rate_min,
                                        double rate_max) {
    EfficiencyModel m;
    m.mode = Mode::fitted;
    m.slope_m = slope_m;
    m.intercept_c = intercept_c;
    m.plateau_floor = plateau_floor;
    m.valid_rate_min = rate_min;
    m.valid_rate_max = rate_max;
    m.validate();
    return m;
}

EfficiencyModel EfficiencyModel::plateau(double floor, double rate_min,
                                         double rate_max) {
    EfficiencyModel m;
    m.mode = Mode::plateau;
    m.slope_m = 0.0;
    m.intercept_c = std::log10(floor);
    m.plateau_floor = floor;
    m.valid_rate_min = rate_min;
    m.valid_rate_max = rate_max;
    m.validate();
    return m;
}

void EfficiencyModel::validate() const {
    require_finite(plateau_floor, "plateau_floor");
    if (plateau_floor <= 0.0) {
        throw DomainError("plateau_floor must be > 0");
    }
    require_finite(valid_rate_min, "valid_rate_min");
    require_finite(valid_rate_max, "valid_rate_max");
    if (valid_rate_min <= 0.0 || valid_rate_min >= valid_rate_max) {
        throw DomainError("require 0 < valid_rate_min < valid_rate_max");
    }
    if (mode == Mode::fitted) {
        require_finite(slope_m, "slope_m");
        require_finite(intercept_c, "intercept_c");
    }
}

void CommProtocol::validate() const {
    require_finite(energy_per_bit, "energy_per_bit");
    require_finite(max_rate, "max_rate");
    if (energy_per_bit <= 0.0) {
        throw DomainError("energy_per_bit must be > 0");
    }
    if (max_rate <= 0.0) {
        throw DomainError("max_rate must be > 0");
    }
}

void Battery::validate() const {
    require_finite(capacity_mah, "capacity_mah");
    require_finite(nominal_voltage, "nominal_voltage");
    if (capacity_mah <= 0.0) {
        throw DomainError("battery capacity must be > 0");
    }
    if (nominal_voltage <= 0.0) {
        throw DomainError("battery voltage must be > 0");
    }
}

void HarvestBand::validate() const {
    require_finite(p_min, "p_min");
    require_finite(p_max, "p_max");
    if (p_min < 0.0 || p_min > p_max) {
        throw DomainError("require 0 <= p_min <= p_max");
    }
}

void NodeConfig::validate() const {
    sensing.validate();
    comm.validate();
    require_finite(system_efficiency, "system_efficiency");
    if (system_efficiency <= 0.0 || system_efficiency > 1.0) {
        throw DomainError("system_efficiency must be in (0, 1]");
    }
    if (battery) {
        battery->validate();
    }
    if (harvest) {
        harvest->validate();
    }
}

double sensing_efficiency(double rate_bps, const EfficiencyModel& model) {
    if (!std::isfinite(rate_bps) || rate_bps <= 0.0) {
        throw DomainError("rate must be a positive finite value in bits/s");
    }
    if (model.mode == EfficiencyModel::Mode::plateau) {
        return model.plateau_floor;
    }
    double line = std::pow(10.0, model.slope_m * std::log10(rate_bps) +
                                     model.intercept_c);
    return std::max(model.plateau_floor, line);
}

double total_energy(double bits_sensed, double eta_sensing, double eta_comm) {
    require_finite(bits_sensed, "bits_sensed");
    require_finite(eta_sensing, "eta_sensing");
    require_finite(eta_comm, "eta_comm");
    if (bits_sensed < 0.0) {
        throw DomainError("bits_sensed must be >= 0");
    }
    if (eta_sensing < 0.0 || eta_comm < 0.0) {
        throw DomainError("per-bit energies must be >= 0");
    }
    return bits_sensed * (eta_sensing + eta_comm);
}

double node_power(double rate_bps, const NodeConfig& config) {
    if (!std::isfinite(rate_bps) || rate_bps <= 0.0) {
        throw DomainError("rate must be a positive finite value in bits/s");
    }
    if (rate_bps > config.comm.max_rate) {
        throw CapabilityError("rate " + std::to_string(rate_bps) +
                              " bits/s exceeds max rate of protocol '" +
                              config.comm.name + "'");
    }
    double eta_s = sensing_efficiency(rate_bps, config.sensing);
    return rate_bps * (eta_s + config.comm.energy_per_bit) /
           config.system_efficiency;
}

double battery_energy(const Battery& battery) {
    battery.validate();
    // mAh * V * 3.6 = J (1 mAh = 3.6 C)
    return battery.capacity_mah * battery.nominal_voltage * 3.6;
}

LifetimeResult lifetime(const Battery& battery, double load_power_w,
                        double harvest_power_w) {
    require_finite(load_power_w, "load_power");
    require_finite(harvest_power_w, "harvest_power");
    if (load_power_w <= 0.0) {
        throw DomainError("load power must be > 0");
    }
    if (harvest_power_w < 0.0) {
        throw DomainError("harvest power must be >= 0");
    }
    if (harvest_power_w >= load_power_w) {
        return {true, 0.0};
    }
    return {false, battery_energy(battery) / (load_power_w - harvest_power_w)};
}

}  // namespace iob
