#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fleetcharge::testing {

StationSpec make_station(const std::string& id, int ports, double price, double power) {
    StationSpec s;
    s.id = id;
    s.port_count = ports;
    s.electricity_price_energy = price;
    s.port_power = power;
    return s;
}

TruckSpec make_truck(const std::string& id, std::vector<Minutes> segments, std::vector<Minutes> detours,
                     std::vector<StationId> stations, Kwh e_initial, Minutes depart) {
    TruckSpec t;
    t.id = id;
    t.route.ramp_count = static_cast<int>(stations.size());
    t.route.segment_times = std::move(segments);
    t.route.detour_times = std::move(detours);
    t.route.station_ids = std::move(stations);
    t.e_initial = e_initial;
    t.depart_time = depart;
    return t;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("fleetcharge_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::filesystem::path data_dir() { return FLEETCHARGE_TEST_DATA; }
std::filesystem::path templates_dir() { return FLEETCHARGE_TEMPLATES; }

ScenarioTemplate load_template(const std::string& name) {
    return template_from_json(nlohmann::json::parse(read_file(templates_dir() / name)));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

PlannerInput random_planner_input(std::mt19937_64& rng, std::size_t max_stations) {
    PlannerInput in;
    const std::size_t m = static_cast<std::size_t>(rng() % (max_stations + 1));
    for (std::size_t j = 0; j < m; ++j) {
        in.stations.push_back(make_station("S" + std::to_string(j + 1), 3, uniform(rng, 0.2, 0.6)));
        in.segment_times.push_back(uniform(rng, 20.0, 120.0));
        in.detour_times.push_back(uniform(rng, 1.0, 15.0));
        if (j > 0) in.assumed_waits.push_back(uniform(rng, 0.0, 30.0));
    }
    const auto& p = in.truck;
    if (m == 0) {
        // Only the final leg remains; keep it drivable from a full battery.
        in.lead_time = uniform(rng, 20.0, 200.0);
        in.battery = uniform(rng, p.e_safe + p.p_bar * in.lead_time, p.e_full);
    } else {
        in.quoted_wait = uniform(rng, 0.0, 40.0);
        in.battery = uniform(rng, p.e_safe + p.p_bar * in.detour_times[0], p.e_full);
    }
    double travel = in.lead_time;
    for (double tau : in.segment_times) travel += tau;
    in.remaining_time = travel + uniform(rng, -20.0, 200.0);
    return in;
}

}  // namespace fleetcharge::testing
