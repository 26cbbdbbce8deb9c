#include "iob/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "iob/errors.hpp"
#include "iob/format.hpp"

namespace iob {

HarvestProfile HarvestProfile::constant(double power_w) {
    return stepwise({{0.0, power_w}});
}

HarvestProfile HarvestProfile::stepwise(
    std::vector<std::pair<double, double>> breakpoints,
    std::optional<double> period_s) {
    if (breakpoints.empty() || breakpoints.front().first != 0.0) {
        throw DomainError("harvest profile must start at time 0");
    }
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (breakpoints[i].second < 0.0 || !std::isfinite(breakpoints[i].second)) {
            throw DomainError("harvest power must be >= 0");
        }
        if (i > 0 && breakpoints[i].first <= breakpoints[i - 1].first) {
            throw DomainError("harvest profile times must be strictly increasing");
        }
    }
    if (period_s && *period_s <= breakpoints.back().first) {
        throw DomainError("profile period must exceed the last breakpoint time");
    }
    HarvestProfile p;
    p.breakpoints_ = std::move(breakpoints);
    p.period_ = period_s;
    return p;
}

HarvestProfile HarvestProfile::from_csv(std::istream& in,
                                        std::optional<double> period_s) {
    std::vector<std::pair<double, double>> pts;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != "time_s,power_w") {
                throw IngestError(0, "header", "expected 'time_s,power_w'");
            }
            header_seen = true;
            continue;
        }
        ++row;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw IngestError(row, "row", "expected two comma-separated fields");
        }
        try {
            double t = std::stod(line.substr(0, comma));
            double p = std::stod(line.substr(comma + 1));
            pts.emplace_back(t, p);
        } catch (const std::exception&) {
            throw IngestError(row, "row", "unparsable number in '" + line + "'");
        }
    }
    if (!header_seen) {
        throw IngestError(0, "header", "profile has no header row");
    }
    try {
        return stepwise(std::move(pts), period_s);
    } catch (const DomainError& e) {
        throw IngestError(row, "time_s", e.what());
    }
}

double HarvestProfile::power_at(double t) const {
    if (t < 0.0) {
        throw DomainError("time must be >= 0");
    }
    if (period_) {
        t = std::fmod(t, *period_);
    }
    auto it = std::upper_bound(
        breakpoints_.begin(), breakpoints_.end(), t,
        [](double v, const auto& bp) { return v < bp.first; });
    return std::prev(it)->second;
}

void SimTrace::write_csv(std::ostream& out) const {
    out << "time_s,energy_j\n";
    for (std::size_t k = 0; k < samples.size(); ++k) {
        out << fmt_sci(static_cast<double>(k) * dt) << ',' << fmt_sci(samples[k])
            << '\n';
    }
}

SimTrace simulate(const NodeConfig& config, double rate_bps,
                  const HarvestProfile& profile, double dt, double horizon) {
    config.validate();
    if (!config.battery) {
        throw DomainError("simulation requires a battery in the node config");
    }
    if (!(dt > 0.0)) {
        throw DomainError("dt must be > 0");
    }
    if (dt >= horizon) {
        throw DomainError("horizon must exceed dt");
    }
    const double load = node_power(rate_bps, config);
    const double cap = battery_energy(*config.battery);

    SimTrace trace;
    trace.dt = dt;
    trace.samples.reserve(static_cast<std::size_t>(horizon / dt) + 2);
    double energy = cap;
    trace.samples.push_back(energy);

    // Steady-state detection for periodic profiles: battery clamped at
    // capacity at two consecutive period boundaries means the trajectory
    // repeats forever.
    const std::optional<double> period = profile.period();
    long prev_period_index = 0;
    bool prev_boundary_full = true; // t = 0 starts full

    double t = 0.0;
    while (t < horizon) {
        double net = profile.power_at(t) - load;
        energy = std::clamp(energy + net * dt, 0.0, cap);
        t += dt;
        trace.samples.push_back(energy);
        if (energy <= 0.0) {
            trace.terminal = SimTerminal::depleted;
            trace.terminal_time = t;
            return trace;
        }
        if (period) {
            long idx = static_cast<long>(std::floor(t / *period));
            if (idx > prev_period_index) {
                bool full = energy >= cap * (1.0 - 1e-12);
                if (full && prev_boundary_full) {
                    trace.terminal = SimTerminal::steady_state_perpetual;
                    trace.terminal_time = t;
                    return trace;
                }
                prev_boundary_full = full;
                prev_period_index = idx;
            }
        }
    }
    trace.terminal = SimTerminal::survived;
    trace.terminal_time = t;
    return trace;
}

LifetimeResult sim_lifetime(const NodeConfig& config, double rate_bps,
                            double constant_harvest_w, double dt) {
    config.validate();
    if (!config.battery) {
        throw DomainError("simulation requires a battery in the node config");
    }
    if (!(dt > 0.0)) {
        throw DomainError("dt must be > 0");
    }
    if (constant_harvest_w < 0.0) {
        throw DomainError("harvest power must be >= 0");
    }
    const double load = node_power(rate_bps, config);
    if (constant_harvest_w >= load) {
        return {true, 0.0};
    }
    const double cap = battery_energy(*config.battery);
    const double net = constant_harvest_w - load; // negative
    double energy = cap;
    double t = 0.0;
    while (true) {
        energy += net * dt;
        t += dt;
        if (energy <= 0.0) {
            return {false, t};
        }
    }
}

}  // namespace iob
