#pragma once

// Shared builders for tests and the acceptance suite.

#include <filesystem>
#include <string>
#include <vector>

#include <random>

#include "fleetcharge/charge_planner.hpp"
#include "fleetcharge/core_model.hpp"
#include "fleetcharge/scenario_generator.hpp"

namespace fleetcharge::testing {

StationSpec make_station(const std::string& id, int ports = 3, double price = 0.36, double power = 300.0);

/// Truck with default parameters on the given route.
TruckSpec make_truck(const std::string& id, std::vector<Minutes> segments, std::vector<Minutes> detours,
                     std::vector<StationId> stations, Kwh e_initial, Minutes depart);

std::string read_file(const std::filesystem::path& p);

/// Fresh, empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::filesystem::path data_dir();
std::filesystem::path templates_dir();

ScenarioTemplate load_template(const std::string& name);

/// Uniform double in [lo, hi) with a portable mapping of the engine output.
double uniform(std::mt19937_64& rng, double lo, double hi);

/// Random planner instance with default truck parameters and 0..max_stations
/// remaining stations; travel, detour, wait, price and deadline slack vary.
PlannerInput random_planner_input(std::mt19937_64& rng, std::size_t max_stations);

}  // namespace fleetcharge::testing
