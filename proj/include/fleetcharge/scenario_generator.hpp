#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fleetcharge/core_model.hpp"

namespace fleetcharge {

/// Knobs for synthetic corridor scenarios. Stations sit in a fixed order;
/// every route visits a sorted random subset of them, in either direction.
struct ScenarioTemplate {
    std::string label = "synthetic";
    int truck_count = 10;
    int station_count = 6;
    int ports_min = 3;
    int ports_max = 3;
    Kw port_power = 300.0;
    double electricity_price = 0.36;   // euro/kWh
    double price_spread = 0.0;         // per-station price uniform in price*(1 +/- spread)
    int route_stations_min = 2;
    int route_stations_max = 4;
    Minutes segment_min = 60.0;
    Minutes segment_max = 120.0;
    Minutes detour_min = 2.0;
    Minutes detour_max = 10.0;
    Minutes depart_min = 480.0;        // 08:00
    Minutes depart_max = 600.0;        // 10:00
    Minutes extra_time_budget = 160.0;
    Minutes w_hat = 12.0;
    TruckParams truck;
    int max_retries = 200;
};

class TemplateError : public std::invalid_argument {
public:
    TemplateError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Missing keys keep their defaults; unknown keys are rejected.
ScenarioTemplate template_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const ScenarioTemplate& t);
void validate_template(const ScenarioTemplate& t);

/// Deterministic in (template, seed). Trucks whose route cannot be completed
/// even with unlimited charging facilities are resampled.
Scenario generate_scenario(const ScenarioTemplate& t, std::uint64_t seed);

}  // namespace fleetcharge
