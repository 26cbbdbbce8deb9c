#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "iob/benchfit.hpp"
#include "iob/config_io.hpp"
#include "iob/core_model.hpp"
#include "iob/errors.hpp"
#include "iob/feasibility.hpp"
#include "iob/format.hpp"
#include "iob/simkernel.hpp"
#include "iob/svg.hpp"

namespace {

constexpr const char* kVersion = "iobtool 1.0.0";

using iob::fmt_sci;

// write-temp-then-rename so partial output never lands under the final name
void atomic_write(const std::string& path, const std::string& content) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        }
        out << content;
    }
    std::filesystem::rename(tmp, target);
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
    } else {
        atomic_write(out_path, content);
    }
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default: out += c;
        }
    }
    return out;
}

// Resolution order for a node config: explicit file > built-in preset >
// $IOBTOOL_PRESET_DIR/<name>.json.
iob::NodeConfig resolve_config(const std::string& config_path,
                               const std::string& preset_name) {
    if (!config_path.empty()) {
        return iob::load_node_config(config_path);
    }
    if (preset_name.empty()) {
        throw iob::ConfigError("either --config or --preset is required");
    }
    if (iob::is_preset(preset_name)) {
        return iob::preset(preset_name);
    }
    if (const char* dir = std::getenv("IOBTOOL_PRESET_DIR")) {
        auto candidate = std::filesystem::path(dir) / (preset_name + ".json");
        if (std::filesystem::exists(candidate)) {
            return iob::load_node_config(candidate.string());
        }
    }
    throw iob::ConfigError("unknown preset '" + preset_name + "'");
}

// Accepts either a built-in preset name or a config file path.
iob::NodeConfig resolve_config_any(const std::string& ref) {
    if (iob::is_preset(ref)) {
        return iob::preset(ref);
    }
    return resolve_config(ref.empty() ? "" : ref, "");
}

void apply_battery_flags(iob::NodeConfig& config, std::optional<double> mah,
                         double voltage) {
    if (mah) {
        config.battery = iob::Battery{*mah, voltage};
        config.battery->validate();
    }
}

std::string stamp_field(bool stamp) {
    return stamp ? std::string("  \"tool_version\": \"") + kVersion + "\",\n" : "";
}

int cmd_fit(const std::string& input, double plateau,
            std::pair<double, double> sens_band, int bits,
            const std::string& out_path, bool lenient, bool stamp) {
    std::ifstream in(input);
    if (!in) {
        throw iob::ConfigError("cannot open input '" + input + "'");
    }
    auto ingest = iob::ingest_records(in, lenient);
    for (const auto& e : ingest.skipped) {
        std::cerr << "warning: skipped " << e.what() << "\n";
    }

    std::string cohort_desc = "none";
    auto records = ingest.records;
    bool band_set = sens_band.first > 0.0 || sens_band.second > 0.0;
    if (band_set || bits > 0) {
        std::pair<double, double> band =
            band_set ? sens_band
                     : std::make_pair(0.0, std::numeric_limits<double>::infinity());
        std::optional<int> res = bits > 0 ? std::optional<int>(bits) : std::nullopt;
        records = iob::cohort_filter(records, band, res);
        std::ostringstream d;
        if (band_set) {
            d << "sensitivity in [" << fmt_sci(band.first) << ", "
              << fmt_sci(band.second) << "] V";
        }
        if (bits > 0) {
            d << (band_set ? "; " : "") << "resolution " << bits << " bits";
        }
        cohort_desc = d.str();
    }
    if (records.empty()) {
        throw iob::FitError("empty cohort after filter: " + cohort_desc);
    }

    auto report = iob::fit_loglog(records, plateau, cohort_desc);
    if (report.warning) {
        std::cerr << "warning: " << *report.warning << "\n";
    }

    std::ostringstream j;
    j << "{\n" << stamp_field(stamp);
    j << "  \"slope_m\": " << fmt_sci(report.model.slope_m) << ",\n";
    j << "  \"intercept_c\": " << fmt_sci(report.model.intercept_c) << ",\n";
    j << "  \"plateau_j_per_bit\": " << fmt_sci(report.model.plateau_floor) << ",\n";
    j << "  \"rate_min_bps\": " << fmt_sci(report.model.valid_rate_min) << ",\n";
    j << "  \"rate_max_bps\": " << fmt_sci(report.model.valid_rate_max) << ",\n";
    j << "  \"r_squared\": " << fmt_sci(report.r_squared) << ",\n";
    j << "  \"n_points\": " << report.n_points << ",\n";
    j << "  \"residuals\": [";
    for (std::size_t i = 0; i < report.residuals.size(); ++i) {
        j << (i ? ", " : "") << fmt_sci(report.residuals[i]);
    }
    j << "],\n";
    j << "  \"cohort_filter\": \"" << json_escape(report.cohort_filter) << "\"\n";
    j << "}\n";
    emit(j.str(), out_path);
    return 0;
}

int cmd_power(const std::vector<std::string>& config_refs, double rate_min,
              double rate_max, int points, bool log_spacing,
              const std::string& out_path, const std::string& svg_path,
              bool stamp) {
    std::vector<iob::NodeConfig> configs;
    for (const auto& ref : config_refs) {
        configs.push_back(resolve_config_any(ref));
    }
    if (configs.empty()) {
        throw iob::ConfigError("at least one --config or --preset is required");
    }
    auto sweep = iob::power_sweep(
        configs, rate_min, rate_max, points,
        log_spacing ? iob::GridSpacing::log : iob::GridSpacing::linear);
    for (std::size_t c = 0; c < sweep.labels.size(); ++c) {
        for (Eigen::Index i = 0; i < sweep.rates.size(); ++i) {
            if (std::isnan(sweep.power[c](i))) {
                std::cerr << "warning: rate " << fmt_sci(sweep.rates(i))
                          << " bits/s exceeds max rate of '" << sweep.labels[c]
                          << "'\n";
            }
        }
    }
    std::ostringstream csv;
    if (stamp) {
        csv << "# " << kVersion << "\n";
    }
    sweep.write_csv(csv);
    emit(csv.str(), out_path);
    if (!svg_path.empty()) {
        std::ostringstream svg;
        iob::write_power_chart_svg(sweep, svg);
        atomic_write(svg_path, svg.str());
    }
    return 0;
}

int cmd_lifetime(const std::string& config_path, const std::string& preset_name,
                 double rate, double harvest, std::optional<double> battery_mah,
                 double voltage, bool stamp) {
    auto config = resolve_config(config_path, preset_name);
    apply_battery_flags(config, battery_mah, voltage);
    if (!config.battery) {
        throw iob::ConfigError("no battery: provide --battery-mah or a config "
                               "with a battery section");
    }
    double power = iob::node_power(rate, config);
    auto life = iob::lifetime(*config.battery, power, harvest);

    std::ostringstream j;
    j << "{\n" << stamp_field(stamp);
    j << "  \"power_w\": " << fmt_sci(power) << ",\n";
    if (life.perpetual) {
        j << "  \"lifetime_s\": null,\n  \"lifetime_h\": null,\n";
        j << "  \"perpetual\": true\n";
    } else {
        j << "  \"lifetime_s\": " << fmt_sci(life.seconds) << ",\n";
        j << "  \"lifetime_h\": " << fmt_sci(life.seconds / 3600.0) << ",\n";
        j << "  \"perpetual\": false\n";
    }
    j << "}\n";
    std::cout << j.str();
    return 0;
}

int cmd_feasible(const std::string& config_path, const std::string& preset_name,
                 double harvest, bool stamp) {
    auto config = resolve_config(config_path, preset_name);
    auto result = iob::max_perpetual_rate(config, harvest);

    std::ostringstream j;
    j << "{\n" << stamp_field(stamp);
    j << "  \"feasible\": " << (result.feasible ? "true" : "false") << ",\n";
    if (result.feasible) {
        j << "  \"max_perpetual_rate_bps\": " << fmt_sci(result.rate_bps) << ",\n";
    } else {
        j << "  \"max_perpetual_rate_bps\": null,\n";
    }
    j << "  \"method\": \"" << result.method << "\"\n";
    j << "}\n";
    std::cout << j.str();
    return 0;
}

int cmd_compare(const std::string& ref_a, const std::string& ref_b, double rate,
                std::optional<double> battery_mah, double voltage, bool stamp) {
    auto a = resolve_config_any(ref_a);
    auto b = resolve_config_any(ref_b);
    apply_battery_flags(a, battery_mah, voltage);
    apply_battery_flags(b, battery_mah, voltage);
    auto cmp = iob::compare_lifetime(a, b, rate);

    std::ostringstream j;
    j << "{\n" << stamp_field(stamp);
    j << "  \"lifetime_a_s\": "
      << (cmp.a.perpetual ? "null" : fmt_sci(cmp.a.seconds)) << ",\n";
    j << "  \"lifetime_b_s\": "
      << (cmp.b.perpetual ? "null" : fmt_sci(cmp.b.seconds)) << ",\n";
    if (cmp.ratio) {
        j << "  \"ratio\": " << fmt_sci(*cmp.ratio) << "\n";
    } else {
        j << "  \"ratio\": null,\n";
        j << "  \"note\": \"ratio undefined: at least one side is perpetual\"\n";
    }
    j << "}\n";
    std::cout << j.str();
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& preset_name,
                 double rate, const std::string& profile_path,
                 std::optional<double> harvest, std::optional<double> period,
                 double dt, double horizon, std::optional<double> battery_mah,
                 double voltage, const std::string& out_path, bool stamp) {
    auto config = resolve_config(config_path, preset_name);
    apply_battery_flags(config, battery_mah, voltage);
    if (!config.battery) {
        throw iob::ConfigError("no battery: provide --battery-mah or a config "
                               "with a battery section");
    }

    iob::HarvestProfile profile = iob::HarvestProfile::constant(0.0);
    if (!profile_path.empty()) {
        std::ifstream in(profile_path);
        if (!in) {
            throw iob::ConfigError("cannot open profile '" + profile_path + "'");
        }
        profile = iob::HarvestProfile::from_csv(in, period);
    } else if (harvest) {
        profile = iob::HarvestProfile::constant(*harvest);
    }

    auto trace = iob::simulate(config, rate, profile, dt, horizon);
    if (!out_path.empty()) {
        std::ostringstream csv;
        if (stamp) {
            csv << "# " << kVersion << "\n";
        }
        trace.write_csv(csv);
        atomic_write(out_path, csv.str());
    }

    const char* terminal =
        trace.terminal == iob::SimTerminal::depleted ? "depleted"
        : trace.terminal == iob::SimTerminal::survived ? "survived"
                                                       : "steady-state-perpetual";
    std::ostringstream j;
    j << "{\n" << stamp_field(stamp);
    j << "  \"terminal\": \"" << terminal << "\",\n";
    j << "  \"time_s\": " << fmt_sci(trace.terminal_time) << ",\n";
    j << "  \"dt_s\": " << fmt_sci(trace.dt) << ",\n";
    j << "  \"steps\": " << trace.samples.size() - 1 << "\n";
    j << "}\n";
    std::cout << j.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy/lifetime analysis for body-area sensor nodes"};
    app.require_subcommand(1);
    bool stamp = false;
    app.add_flag("--stamp", stamp, "include a tool version stamp in outputs");

    // fit
    auto* fit = app.add_subcommand("fit", "fit a log-log efficiency model from a survey CSV");
    std::string fit_input, fit_out;
    double fit_plateau = 0.7e-9;
    std::pair<double, double> sens_band{0.0, 0.0};
    int fit_bits = 0;
    bool fit_lenient = false;
    fit->add_option("--input", fit_input, "survey CSV")->required();
    fit->add_option("--plateau", fit_plateau, "plateau floor, J/bit");
    fit->add_option("--sens-band", sens_band, "sensitivity band MIN MAX, volts");
    fit->add_option("--bits", fit_bits, "iso-resolution filter, ADC bits");
    fit->add_flag("--lenient", fit_lenient, "skip malformed rows with a warning");
    fit->add_option("--out", fit_out, "model JSON path (default stdout)");

    // power
    auto* power = app.add_subcommand("power", "power-vs-rate sweep");
    std::vector<std::string> power_presets, power_configs;
    double p_rate_min = 1.0, p_rate_max = 1e8;
    int p_points = 200;
    bool p_log = false;
    std::string power_out, power_svg;
    power->add_option("--preset", power_presets, "built-in preset name (repeatable)");
    power->add_option("--config", power_configs, "config JSON path (repeatable)");
    power->add_option("--rate-min", p_rate_min, "grid start, bits/s");
    power->add_option("--rate-max", p_rate_max, "grid end, bits/s");
    power->add_option("--points", p_points, "grid size");
    power->add_flag("--log", p_log, "log-spaced grid");
    power->add_option("--out", power_out, "sweep CSV path (default stdout)");
    power->add_option("--svg", power_svg, "also write a log-log SVG chart");

    // lifetime
    auto* life = app.add_subcommand("lifetime", "battery lifetime at a data rate");
    std::string l_config, l_preset;
    double l_rate = 0.0, l_harvest = 0.0, l_voltage = 3.0;
    std::optional<double> l_mah;
    life->add_option("--config", l_config, "config JSON path");
    life->add_option("--preset", l_preset, "built-in preset name");
    life->add_option("--rate", l_rate, "data rate, bits/s")->required();
    life->add_option("--harvest", l_harvest, "constant harvest power, W");
    life->add_option("--battery-mah", l_mah, "battery capacity, mAh");
    life->add_option("--voltage", l_voltage, "battery voltage, V (default 3.0)");

    // feasible
    auto* feas = app.add_subcommand("feasible", "max perpetual rate for a harvest power");
    std::string f_config, f_preset;
    double f_harvest = 0.0;
    feas->add_option("--config", f_config, "config JSON path");
    feas->add_option("--preset", f_preset, "built-in preset name");
    feas->add_option("--harvest", f_harvest, "harvest power, W")->required();

    // compare
    auto* comp = app.add_subcommand("compare", "lifetime comparison of two configs");
    std::string c_a, c_b;
    double c_rate = 0.0, c_voltage = 3.0;
    std::optional<double> c_mah;
    comp->add_option("--config-a", c_a, "preset name or config path")->required();
    comp->add_option("--config-b", c_b, "preset name or config path")->required();
    comp->add_option("--rate", c_rate, "data rate, bits/s")->required();
    comp->add_option("--battery-mah", c_mah, "shared battery capacity, mAh");
    comp->add_option("--voltage", c_voltage, "battery voltage, V (default 3.0)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "discrete-time battery simulation");
    std::string s_config, s_preset, s_profile, s_out;
    double s_rate = 0.0, s_dt = 1.0, s_horizon = 0.0, s_voltage = 3.0;
    std::optional<double> s_harvest, s_period, s_mah;
    sim->add_option("--config", s_config, "config JSON path");
    sim->add_option("--preset", s_preset, "built-in preset name");
    sim->add_option("--rate", s_rate, "data rate, bits/s")->required();
    sim->add_option("--profile", s_profile, "harvest profile CSV (time_s,power_w)");
    sim->add_option("--period", s_period, "repeat the profile with this period, s");
    sim->add_option("--harvest", s_harvest, "constant harvest power, W");
    sim->add_option("--dt", s_dt, "time step, s (default 1)");
    sim->add_option("--horizon", s_horizon, "simulation horizon, s")->required();
    sim->add_option("--battery-mah", s_mah, "battery capacity, mAh");
    sim->add_option("--voltage", s_voltage, "battery voltage, V (default 3.0)");
    sim->add_option("--out", s_out, "trace CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) {
            return cmd_fit(fit_input, fit_plateau, sens_band, fit_bits, fit_out,
                           fit_lenient, stamp);
        }
        if (power->parsed()) {
            std::vector<std::string> refs = power_presets;
            refs.insert(refs.end(), power_configs.begin(), power_configs.end());
            return cmd_power(refs, p_rate_min, p_rate_max, p_points, p_log,
                             power_out, power_svg, stamp);
        }
        if (life->parsed()) {
            return cmd_lifetime(l_config, l_preset, l_rate, l_harvest, l_mah,
                                l_voltage, stamp);
        }
        if (feas->parsed()) {
            return cmd_feasible(f_config, f_preset, f_harvest, stamp);
        }
        if (comp->parsed()) {
            return cmd_compare(c_a, c_b, c_rate, c_mah, c_voltage, stamp);
        }
        if (sim->parsed()) {
            return cmd_simulate(s_config, s_preset, s_rate, s_profile, s_harvest,
                                s_period, s_dt, s_horizon, s_mah, s_voltage, s_out,
                                stamp);
        }
    } catch (const iob::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const iob::IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const iob::FitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const iob::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const iob::CapabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
