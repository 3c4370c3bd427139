#include "fleetcharge/core_model.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace fleetcharge {

namespace {

constexpr double kBoundarySlack = 1e-9;

std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

template <typename T>
T require(const nlohmann::json& j, const char* field, const std::string& where) {
    if (!j.is_object() || !j.contains(field)) {
        throw ScenarioFormatError(where + ": missing field '" + field + "'");
    }
    try {
        return j.at(field).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ScenarioFormatError(where + ": field '" + field + "' has the wrong type");
    }
}

}  // namespace

Minutes Route::total_travel() const {
    return std::accumulate(segment_times.begin(), segment_times.end(), 0.0);
}

const StationSpec* Scenario::find_station(const StationId& id) const {
    auto it = std::find_if(stations.begin(), stations.end(),
                           [&](const StationSpec& s) { return s.id == id; });
    return it == stations.end() ? nullptr : &*it;
}

std::vector<Violation> validate_truck_params(const std::string& entity, const TruckParams& p) {
    std::vector<Violation> out;
    if (!(p.e_safe > 0.0)) out.push_back({entity, "e_safe must be positive"});
    if (!(p.e_safe < p.e_full)) out.push_back({entity, "e_safe must be below e_full"});
    if (!(p.p_bar > 0.0)) out.push_back({entity, "p_bar must be positive"});
    if (!(p.p_max > 0.0)) out.push_back({entity, "p_max must be positive"});
    if (!(p.kappa >= 0.0)) out.push_back({entity, "kappa must be nonnegative"});
    if (!(p.rho >= 0.0)) out.push_back({entity, "rho must be nonnegative"});
    return out;
}

std::vector<Violation> validate_station(const StationSpec& s) {
    std::vector<Violation> out;
    const std::string entity = "station " + s.id;
    if (s.port_count < 1) out.push_back({entity, "port_count must be at least 1"});
    if (!(s.port_power > 0.0)) out.push_back({entity, "port_power must be positive"});
    if (!(s.electricity_price_energy >= 0.0)) {
        out.push_back({entity, "electricity_price_energy must be nonnegative"});
    }
    return out;
}

std::vector<Violation> validate_scenario(const Scenario& scenario) {
    std::vector<Violation> out;
    auto append = [&out](std::vector<Violation> more) {
        out.insert(out.end(), more.begin(), more.end());
    };

    std::set<StationId> station_ids;
    for (const auto& s : scenario.stations) {
        if (!station_ids.insert(s.id).second) {
            out.push_back({"station " + s.id, "duplicate station id"});
        }
        append(validate_station(s));
    }

    std::set<TruckId> truck_ids;
    for (const auto& t : scenario.trucks) {
        const std::string entity = "truck " + t.id;
        if (!truck_ids.insert(t.id).second) out.push_back({entity, "duplicate truck id"});
        append(validate_truck_params(entity, t.params));

        const Route& r = t.route;
        const auto n = static_cast<std::size_t>(std::max(r.ramp_count, 0));
        bool shape_ok = true;
        if (r.ramp_count < 0) {
            out.push_back({entity, "ramp_count must be nonnegative"});
            shape_ok = false;
        }
        if (r.detour_times.size() != n) {
            out.push_back({entity, "route needs ramp_count detour times"});
            shape_ok = false;
        }
        if (r.station_ids.size() != n) {
            out.push_back({entity, "route needs ramp_count station ids"});
            shape_ok = false;
        }
        if (r.segment_times.size() != n + 1) {
            out.push_back({entity, "route needs ramp_count + 1 segment times"});
            shape_ok = false;
        }
        for (std::size_t i = 0; i < r.segment_times.size(); ++i) {
            if (!(r.segment_times[i] >= 0.0)) {
                out.push_back({entity, "segment time " + std::to_string(i) + " is negative"});
            }
        }
        for (std::size_t i = 0; i < r.detour_times.size(); ++i) {
            if (!(r.detour_times[i] >= 0.0)) {
                out.push_back({entity, "detour time " + std::to_string(i + 1) + " is negative"});
            }
        }
        for (const auto& sid : r.station_ids) {
            if (scenario.find_station(sid) == nullptr) {
                out.push_back({entity, "dangling reference to station " + sid});
            }
        }

        if (!(t.e_initial <= t.params.e_full)) {
            out.push_back({entity, "initial battery exceeds e_full"});
        }
        if (shape_ok) {
            // Reaching the first station means driving r_0 -> r_1 and then the detour.
            const double needed = n > 0
                ? t.params.e_safe + t.params.p_bar * (r.segment_times[0] + r.detour_times[0])
                : t.params.e_safe + t.params.p_bar * r.segment_times[0];
            if (!(t.e_initial + kBoundarySlack >= needed)) {
                out.push_back({entity, n > 0 ? "initial battery insufficient for first detour ("
                                                   + fmt_num(t.e_initial) + " < " + fmt_num(needed) + ")"
                                             : "initial battery insufficient to reach destination"});
            }
        }
        if (!(t.depart_time >= 0.0)) out.push_back({entity, "depart_time must be nonnegative"});
        if (!(t.extra_time_budget >= 0.0)) {
            out.push_back({entity, "extra_time_budget must be nonnegative"});
        }
        if (!(t.w_hat_default >= 0.0)) out.push_back({entity, "w_hat_default must be nonnegative"});
    }
    return out;
}

Euro electricity_price_per_minute(const StationSpec& station, const TruckParams& truck) {
    return station.electricity_price_energy * std::min(station.port_power, truck.p_max) / 60.0;
}

nlohmann::ordered_json to_json(const TruckParams& p) {
    nlohmann::ordered_json j;
    j["p_bar"] = p.p_bar;
    j["e_full"] = p.e_full;
    j["e_safe"] = p.e_safe;
    j["p_max"] = p.p_max;
    j["kappa"] = p.kappa;
    j["rho"] = p.rho;
    return j;
}

nlohmann::ordered_json to_json(const StationSpec& s) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["port_count"] = s.port_count;
    j["port_power"] = s.port_power;
    j["electricity_price_energy"] = s.electricity_price_energy;
    return j;
}

nlohmann::ordered_json to_json(const Route& r) {
    nlohmann::ordered_json j;
    j["ramp_count"] = r.ramp_count;
    j["segment_times"] = r.segment_times;
    j["detour_times"] = r.detour_times;
    j["station_ids"] = r.station_ids;
    return j;
}

nlohmann::ordered_json to_json(const TruckSpec& t) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["params"] = to_json(t.params);
    j["route"] = to_json(t.route);
    j["e_initial"] = t.e_initial;
    j["depart_time"] = t.depart_time;
    j["extra_time_budget"] = t.extra_time_budget;
    j["w_hat_default"] = t.w_hat_default;
    return j;
}

nlohmann::ordered_json to_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["stations"] = nlohmann::ordered_json::array();
    for (const auto& st : s.stations) j["stations"].push_back(to_json(st));
    j["trucks"] = nlohmann::ordered_json::array();
    for (const auto& t : s.trucks) j["trucks"].push_back(to_json(t));
    j["rng_seed"] = s.rng_seed;
    j["label"] = s.label;
    return j;
}

TruckParams truck_params_from_json(const nlohmann::json& j) {
    const std::string where = "params";
    TruckParams p;
    p.p_bar = require<double>(j, "p_bar", where);
    p.e_full = require<double>(j, "e_full", where);
    p.e_safe = require<double>(j, "e_safe", where);
    p.p_max = require<double>(j, "p_max", where);
    p.kappa = require<double>(j, "kappa", where);
    p.rho = require<double>(j, "rho", where);
    return p;
}

StationSpec station_from_json(const nlohmann::json& j) {
    StationSpec s;
    s.id = require<std::string>(j, "id", "station");
    const std::string where = "station " + s.id;
    s.port_count = require<int>(j, "port_count", where);
    s.port_power = require<double>(j, "port_power", where);
    s.electricity_price_energy = require<double>(j, "electricity_price_energy", where);
    return s;
}

Route route_from_json(const nlohmann::json& j) {
    const std::string where = "route";
    Route r;
    r.ramp_count = require<int>(j, "ramp_count", where);
    r.segment_times = require<std::vector<double>>(j, "segment_times", where);
    r.detour_times = require<std::vector<double>>(j, "detour_times", where);
    r.station_ids = require<std::vector<std::string>>(j, "station_ids", where);
    return r;
}

TruckSpec truck_from_json(const nlohmann::json& j) {
    TruckSpec t;
    t.id = require<std::string>(j, "id", "truck");
    const std::string where = "truck " + t.id;
    if (!j.contains("params")) throw ScenarioFormatError(where + ": missing field 'params'");
    if (!j.contains("route")) throw ScenarioFormatError(where + ": missing field 'route'");
    t.params = truck_params_from_json(j.at("params"));
    t.route = route_from_json(j.at("route"));
    t.e_initial = require<double>(j, "e_initial", where);
    t.depart_time = require<double>(j, "depart_time", where);
    t.extra_time_budget = require<double>(j, "extra_time_budget", where);
    t.w_hat_default = require<double>(j, "w_hat_default", where);
    return t;
}

Scenario scenario_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ScenarioFormatError("scenario: document must be an object");
    Scenario s;
    const auto stations = require<std::vector<nlohmann::json>>(j, "stations", "scenario");
    for (const auto& st : stations) s.stations.push_back(station_from_json(st));
    const auto trucks = require<std::vector<nlohmann::json>>(j, "trucks", "scenario");
    for (const auto& t : trucks) s.trucks.push_back(truck_from_json(t));
    s.rng_seed = require<std::uint64_t>(j, "rng_seed", "scenario");
    s.label = require<std::string>(j, "label", "scenario");
    return s;
}

std::string serialize_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

Scenario parse_scenario(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioFormatError(std::string("scenario: not valid JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioFormatError("cannot open scenario file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write scenario file " + path);
    out << serialize_scenario(s);
}

}  // namespace fleetcharge
