#include "iob/feasibility.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "iob/errors.hpp"
#include "iob/format.hpp"

namespace iob {

namespace {

constexpr double kRateRelTol = 1e-6;
constexpr int kScanPoints = 10000;

double eval_power_or_nan(double rate, const NodeConfig& config) {
    try {
        return node_power(rate, config);
    } catch (const CapabilityError&) {
        return std::nan("");
    }
}

}  // namespace

Eigen::ArrayXd make_rate_grid(double rate_min, double rate_max, int n_points,
                              GridSpacing spacing) {
    if (!(rate_min > 0.0) || !(rate_min < rate_max)) {
        throw DomainError("require 0 < rate_min < rate_max");
    }
    if (n_points < 2) {
        throw DomainError("grid needs at least 2 points");
    }
    Eigen::ArrayXd grid(n_points);
    if (spacing == GridSpacing::log) {
        double lmin = std::log10(rate_min);
        double lmax = std::log10(rate_max);
        for (int i = 0; i < n_points; ++i) {
            grid(i) = std::pow(10.0, lmin + (lmax - lmin) * i / (n_points - 1));
        }
    } else {
        for (int i = 0; i < n_points; ++i) {
            grid(i) = rate_min + (rate_max - rate_min) * i / (n_points - 1);
        }
    }
    grid(0) = rate_min;
    grid(n_points - 1) = rate_max;
    return grid;
}

SweepResult power_sweep(const std::vector<NodeConfig>& configs, double rate_min,
                        double rate_max, int n_points, GridSpacing spacing) {
    SweepResult result;
    result.rates = make_rate_grid(rate_min, rate_max, n_points, spacing);
    for (const auto& config : configs) {
        config.validate();
        Eigen::ArrayXd p(n_points);
        for (int i = 0; i < n_points; ++i) {
            p(i) = eval_power_or_nan(result.rates(i), config);
        }
        if (config.battery) {
            Eigen::ArrayXd life(n_points);
            for (int i = 0; i < n_points; ++i) {
                life(i) = std::isnan(p(i))
                              ? std::nan("")
                              : lifetime(*config.battery, p(i), 0.0).seconds;
            }
            result.lifetime.push_back(std::move(life));
        } else {
            result.lifetime.emplace_back();
        }
        result.power.push_back(std::move(p));
        result.labels.push_back(config.comm.name);
    }
    return result;
}

void SweepResult::write_csv(std::ostream& out) const {
    out << "rate_bps";
    for (std::size_t c = 0; c < labels.size(); ++c) {
        out << ',' << labels[c] << "_power_w";
        if (lifetime[c].size() > 0) {
            out << ',' << labels[c] << "_lifetime_s";
        }
    }
    out << '\n';
    for (Eigen::Index i = 0; i < rates.size(); ++i) {
        out << fmt_sci(rates(i));
        for (std::size_t c = 0; c < labels.size(); ++c) {
            out << ',';
            if (!std::isnan(power[c](i))) {
                out << fmt_sci(power[c](i));
            }
            if (lifetime[c].size() > 0) {
                out << ',';
                if (!std::isnan(lifetime[c](i))) {
                    out << fmt_sci(lifetime[c](i));
                }
            }
        }
        out << '\n';
    }
}

double knee_rate(const EfficiencyModel& model, bool* clamped) {
    model.validate();
    if (model.mode == EfficiencyModel::Mode::plateau || model.slope_m >= 0.0) {
        throw DomainError("no knee: model has no descending log-log line");
    }
    double knee = std::pow(
        10.0, (std::log10(model.plateau_floor) - model.intercept_c) / model.slope_m);
    bool was_clamped = false;
    if (knee < model.valid_rate_min) {
        knee = model.valid_rate_min;
        was_clamped = true;
    } else if (knee > model.valid_rate_max) {
        knee = model.valid_rate_max;
        was_clamped = true;
    }
    if (clamped) {
        *clamped = was_clamped;
    }
    return knee;
}

PerpetualRate max_perpetual_rate(const NodeConfig& config, double harvest_power_w) {
    config.validate();
    if (!(harvest_power_w > 0.0)) {
        throw DomainError("harvest power must be > 0");
    }
    double lo = config.sensing.valid_rate_min;
    double hi = std::min(config.sensing.valid_rate_max, config.comm.max_rate);

    PerpetualRate result;
    result.harvest_w = harvest_power_w;
    result.method = config.sensing.power_monotone() ? "bisection" : "scan";

    if (node_power(lo, config) > harvest_power_w) {
        result.feasible = false;
        result.rate_bps = 0.0;
        return result;
    }
    result.feasible = true;

    if (config.sensing.power_monotone()) {
        if (node_power(hi, config) <= harvest_power_w) {
            result.rate_bps = hi;
            result.range_clamped = true;
            return result;
        }
        while (hi - lo > kRateRelTol * lo) {
            double mid = std::sqrt(lo * hi);
            if (node_power(mid, config) <= harvest_power_w) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Secant step on the final bracket; exact for plateau sensing where
        // node_power is linear in rate.
        double flo = node_power(lo, config);
        double fhi = node_power(hi, config);
        if (fhi > flo) {
            double candidate = lo + (harvest_power_w - flo) * (hi - lo) / (fhi - flo);
            if (candidate >= lo && candidate <= hi &&
                node_power(candidate, config) <= harvest_power_w) {
                lo = candidate;
            }
        }
        result.rate_bps = lo;
        return result;
    }

    // Non-monotone power: coarse log scan, then refine the last crossing.
    Eigen::ArrayXd grid = make_rate_grid(lo, hi, kScanPoints, GridSpacing::log);
    Eigen::Index last_ok = -1;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        if (node_power(grid(i), config) <= harvest_power_w) {
            last_ok = i;
        }
    }
    if (last_ok == grid.size() - 1) {
        result.rate_bps = hi;
        result.range_clamped = true;
        return result;
    }
    double a = grid(last_ok);
    double b = grid(last_ok + 1);
    while (b - a > kRateRelTol * a) {
        double mid = std::sqrt(a * b);
        if (node_power(mid, config) <= harvest_power_w) {
            a = mid;
        } else {
            b = mid;
        }
    }
    result.rate_bps = a;
    return result;
}

LifetimeComparison compare_lifetime(const NodeConfig& config_a,
                                    const NodeConfig& config_b, double rate_bps) {
    if (!config_a.battery || !config_b.battery) {
        throw DomainError("both configs need a battery for lifetime comparison");
    }
    if (config_a.battery->capacity_mah != config_b.battery->capacity_mah ||
        config_a.battery->nominal_voltage != config_b.battery->nominal_voltage) {
        throw DomainError("configs must share a battery definition");
    }
    LifetimeComparison cmp;
    cmp.a = lifetime(*config_a.battery, node_power(rate_bps, config_a), 0.0);
    cmp.b = lifetime(*config_b.battery, node_power(rate_bps, config_b), 0.0);
    if (!cmp.a.perpetual && !cmp.b.perpetual) {
        cmp.ratio = cmp.b.seconds / cmp.a.seconds;
    }
    return cmp;
}

std::vector<std::pair<std::string, double>> load_workloads(std::istream& in) {
    std::vector<std::pair<std::string, double>> out;
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
            if (line.rfind("name,rate_bps", 0) != 0) {
                throw IngestError(0, "header", "expected 'name,rate_bps[,notes]'");
            }
            header_seen = true;
            continue;
        }
        ++row;
        auto c1 = line.find(',');
        if (c1 == std::string::npos) {
            throw IngestError(row, "row", "expected at least two fields");
        }
        auto c2 = line.find(',', c1 + 1);
        std::string rate_str = line.substr(
            c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1);
        double rate = 0.0;
        try {
            rate = std::stod(rate_str);
        } catch (const std::exception&) {
            throw IngestError(row, "rate_bps", "unparsable rate '" + rate_str + "'");
        }
        if (!(rate > 0.0)) {
            throw IngestError(row, "rate_bps", "rate must be > 0");
        }
        out.emplace_back(line.substr(0, c1), rate);
    }
    if (!header_seen) {
        throw IngestError(0, "header", "workload table has no header row");
    }
    return out;
}

std::vector<WorkloadVerdict> classify_workloads(
    const NodeConfig& config,
    const std::vector<std::pair<std::string, double>>& workloads,
    const HarvestBand& band) {
    config.validate();
    band.validate();
    std::vector<WorkloadVerdict> verdicts;
    for (const auto& [name, rate] : workloads) {
        if (!(rate > 0.0)) {
            throw DomainError("workload '" + name + "' has non-positive rate");
        }
        WorkloadVerdict v;
        v.name = name;
        v.rate_bps = rate;
        v.power_w = node_power(rate, config);
        if (v.power_w <= band.p_min) {
            v.classification = WorkloadClass::perpetual_worst_case;
        } else if (v.power_w <= band.p_max) {
            v.classification = WorkloadClass::perpetual;
        } else {
            v.classification = WorkloadClass::battery_limited;
            if (config.battery) {
                v.lifetime_s = lifetime(*config.battery, v.power_w, 0.0).seconds;
            }
        }
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

}  // namespace iob
