#pragma once

// Domain types shared by every part of the simulator.
//
// Units everywhere: time in minutes (epoch 0 = start of the scenario day),
// energy in kWh, power in kW, money in euro. kW * minutes / 60 = kWh.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fleetcharge {

using Minutes = double;
using Kwh = double;
using Kw = double;
using Euro = double;
using TruckId = std::string;
using StationId = std::string;

/// Charging power in kWh per minute for a port of `port_power` kW feeding a
/// battery that accepts at most `p_max` kW.
inline double charge_rate_per_minute(Kw port_power, Kw p_max) {
    return (port_power < p_max ? port_power : p_max) / 60.0;
}

struct TruckParams {
    double p_bar = 1.83;     // kWh per travel minute
    Kwh e_full = 624.0;
    Kwh e_safe = 156.0;
    Kw p_max = 375.0;
    double kappa = 0.4;      // labor, euro/min
    double rho = 10.0;       // deadline penalty, euro per overtime minute

    bool operator==(const TruckParams&) const = default;
};

struct StationSpec {
    StationId id;
    int port_count = 3;
    Kw port_power = 300.0;
    double electricity_price_energy = 0.36;  // euro/kWh

    bool operator==(const StationSpec&) const = default;
};

/// A truck's fixed route: ramps r_1..r_N between origin r_0 and destination
/// r_{N+1}. segment_times[k] is the travel r_k -> r_{k+1} (N+1 entries);
/// detour_times[k-1] and station_ids[k-1] belong to ramp r_k.
struct Route {
    int ramp_count = 0;
    std::vector<Minutes> segment_times;
    std::vector<Minutes> detour_times;
    std::vector<StationId> station_ids;

    Minutes total_travel() const;

    bool operator==(const Route&) const = default;
};

struct TruckSpec {
    TruckId id;
    TruckParams params;
    Route route;
    Kwh e_initial = 0.0;
    Minutes depart_time = 0.0;
    Minutes extra_time_budget = 160.0;
    Minutes w_hat_default = 12.0;

    Minutes deadline() const { return depart_time + route.total_travel() + extra_time_budget; }

    bool operator==(const TruckSpec&) const = default;
};

/// Where a truck is between events. next_ramp is 1-based; N+1 means the
/// truck is on its final segment.
struct TruckState {
    int next_ramp = 1;
    Minutes clock = 0.0;
    Kwh battery = 0.0;
    Minutes deadline = 0.0;

    Minutes remaining_budget() const { return deadline - clock; }
};

struct ChargeDecision {
    bool charge = false;
    Minutes duration = 0.0;

    bool operator==(const ChargeDecision&) const = default;
};

struct ChargingPlan {
    std::vector<ChargeDecision> decisions;  // stations k..N in route order
    Euro anticipated_cost = 0.0;
    Minutes anticipated_overtime = 0.0;

    bool operator==(const ChargingPlan&) const = default;
};

struct Scenario {
    std::vector<StationSpec> stations;
    std::vector<TruckSpec> trucks;
    std::uint64_t rng_seed = 0;
    std::string label;

    const StationSpec* find_station(const StationId& id) const;

    bool operator==(const Scenario&) const = default;
};

struct Violation {
    std::string entity;
    std::string message;

    bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_scenario(const Scenario& scenario);
std::vector<Violation> validate_truck_params(const std::string& entity, const TruckParams& params);
std::vector<Violation> validate_station(const StationSpec& station);

/// Electricity cost per charging minute: the per-kWh price billed at the
/// effective power min(port_power, p_max).
Euro electricity_price_per_minute(const StationSpec& station, const TruckParams& truck);

// JSON (field names match the scenario file schema).
nlohmann::ordered_json to_json(const TruckParams& p);
nlohmann::ordered_json to_json(const StationSpec& s);
nlohmann::ordered_json to_json(const Route& r);
nlohmann::ordered_json to_json(const TruckSpec& t);
nlohmann::ordered_json to_json(const Scenario& s);

TruckParams truck_params_from_json(const nlohmann::json& j);
StationSpec station_from_json(const nlohmann::json& j);
Route route_from_json(const nlohmann::json& j);
TruckSpec truck_from_json(const nlohmann::json& j);
Scenario scenario_from_json(const nlohmann::json& j);

std::string serialize_scenario(const Scenario& s);
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

/// Thrown for files that are not a structurally valid scenario document
/// (missing fields, wrong JSON types). Invariant breaches are reported by
/// validate_scenario instead.
class ScenarioFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fleetcharge
