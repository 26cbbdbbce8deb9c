#include "iob/config_io.hpp"

#include <fstream>
#include <set>

#include "iob/errors.hpp"

namespace iob {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key at " + path + "/" + key);
        }
    }
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) {
        throw ConfigError("missing key at " + path + "/" + key);
    }
    if (!obj[key].is_number()) {
        throw ConfigError("expected a number at " + path + "/" + key);
    }
    return obj[key].get<double>();
}

std::string get_string(const json& obj, const std::string& path,
                       const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw ConfigError("expected a string at " + path + "/" + key);
    }
    return obj[key].get<std::string>();
}

EfficiencyModel parse_sensing(const json& obj) {
    reject_unknown_keys(obj, "/sensing",
                        {"mode", "slope_m", "intercept_c", "plateau_j_per_bit",
                         "rate_min_bps", "rate_max_bps"});
    std::string mode = get_string(obj, "/sensing", "mode");
    double floor = get_number(obj, "/sensing", "plateau_j_per_bit");
    double rate_min =
        obj.contains("rate_min_bps") ? get_number(obj, "/sensing", "rate_min_bps") : 1.0;
    double rate_max =
        obj.contains("rate_max_bps") ? get_number(obj, "/sensing", "rate_max_bps") : 1e8;
    try {
        if (mode == "plateau") {
            return EfficiencyModel::plateau(floor, rate_min, rate_max);
        }
        if (mode == "fitted") {
            return EfficiencyModel::fitted(get_number(obj, "/sensing", "slope_m"),
                                           get_number(obj, "/sensing", "intercept_c"),
                                           floor, rate_min, rate_max);
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid value at /sensing: ") + e.what());
    }
    throw ConfigError("unknown sensing mode '" + mode +
                      "' at /sensing/mode (expected 'fitted' or 'plateau')");
}

}  // namespace

NodeConfig parse_node_config(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config document must be a JSON object");
    }
    reject_unknown_keys(doc, "",
                        {"sensing", "comm", "system_efficiency", "battery", "harvest"});
    if (!doc.contains("sensing") || !doc.contains("comm") ||
        !doc.contains("system_efficiency")) {
        throw ConfigError("config requires /sensing, /comm and /system_efficiency");
    }

    NodeConfig config;
    config.sensing = parse_sensing(doc["sensing"]);

    const json& comm = doc["comm"];
    reject_unknown_keys(comm, "/comm",
                        {"name", "energy_per_bit_j", "max_rate_bps", "range_note"});
    config.comm.name = get_string(comm, "/comm", "name");
    config.comm.energy_per_bit = get_number(comm, "/comm", "energy_per_bit_j");
    config.comm.max_rate = get_number(comm, "/comm", "max_rate_bps");
    if (comm.contains("range_note")) {
        config.comm.range_note = get_string(comm, "/comm", "range_note");
    }

    if (!doc["system_efficiency"].is_number()) {
        throw ConfigError("expected a number at /system_efficiency");
    }
    config.system_efficiency = doc["system_efficiency"].get<double>();

    if (doc.contains("battery")) {
        const json& b = doc["battery"];
        reject_unknown_keys(b, "/battery", {"capacity_mah", "voltage_v"});
        config.battery = Battery{get_number(b, "/battery", "capacity_mah"),
                                 get_number(b, "/battery", "voltage_v")};
    }
    if (doc.contains("harvest")) {
        const json& h = doc["harvest"];
        reject_unknown_keys(h, "/harvest", {"p_min_w", "p_max_w"});
        config.harvest = HarvestBand{get_number(h, "/harvest", "p_min_w"),
                                     get_number(h, "/harvest", "p_max_w")};
    }

    try {
        config.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return config;
}

NodeConfig load_node_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_node_config(doc);
}

nlohmann::json node_config_to_json(const NodeConfig& config) {
    json doc;
    if (config.sensing.mode == EfficiencyModel::Mode::plateau) {
        doc["sensing"] = {{"mode", "plateau"},
                          {"plateau_j_per_bit", config.sensing.plateau_floor},
                          {"rate_min_bps", config.sensing.valid_rate_min},
                          {"rate_max_bps", config.sensing.valid_rate_max}};
    } else {
        doc["sensing"] = {{"mode", "fitted"},
                          {"slope_m", config.sensing.slope_m},
                          {"intercept_c", config.sensing.intercept_c},
                          {"plateau_j_per_bit", config.sensing.plateau_floor},
                          {"rate_min_bps", config.sensing.valid_rate_min},
                          {"rate_max_bps", config.sensing.valid_rate_max}};
    }
    doc["comm"] = {{"name", config.comm.name},
                   {"energy_per_bit_j", config.comm.energy_per_bit},
                   {"max_rate_bps", config.comm.max_rate}};
    if (!config.comm.range_note.empty()) {
        doc["comm"]["range_note"] = config.comm.range_note;
    }
    doc["system_efficiency"] = config.system_efficiency;
    if (config.battery) {
        doc["battery"] = {{"capacity_mah", config.battery->capacity_mah},
                          {"voltage_v", config.battery->nominal_voltage}};
    }
    if (config.harvest) {
        doc["harvest"] = {{"p_min_w", config.harvest->p_min},
                          {"p_max_w", config.harvest->p_max}};
    }
    return doc;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"bluetooth", "wir", "wir-future"};
    return names;
}

bool is_preset(const std::string& name) {
    const auto& names = preset_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

NodeConfig preset(const std::string& name) {
    NodeConfig config;
    config.sensing = EfficiencyModel::plateau(0.7e-9, 1.0, 1e8);
    config.system_efficiency = 0.4;
    if (name == "bluetooth") {
        config.comm = {"bluetooth", 15e-9, 1e8, "RF radiative, room range"};
    } else if (name == "wir") {
        config.comm = {"wir", 100e-12, 1e8, "EQS-HBC, on-body"};
    } else if (name == "wir-future") {
        config.comm = {"wir-future", 10e-12, 1e8, "EQS-HBC, on-body (projected)"};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    config.validate();
    return config;
}

}  // namespace iob
