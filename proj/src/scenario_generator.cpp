#include "fleetcharge/scenario_generator.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "fleetcharge/sim_engine.hpp"

namespace fleetcharge {

namespace {

// std:: distributions are implementation-defined; these are not, so
// scenario files stay identical across standard libraries.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(rng_() % span);
    }
    bool coin() { return (rng_() >> 63) != 0; }

private:
    std::mt19937_64 rng_;
};

std::string padded_id(char prefix, int value, int width) {
    std::string digits = std::to_string(value);
    if (static_cast<int>(digits.size()) < width) digits.insert(0, width - digits.size(), '0');
    return prefix + digits;
}

int id_width(int count) {
    int width = 2;
    for (int limit = 100; count >= limit; limit *= 10) ++width;
    return width;
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw TemplateError(key, "has the wrong type");
    }
}

void check(bool ok, const char* field, const char* what) {
    if (!ok) throw TemplateError(field, what);
}

}  // namespace

ScenarioTemplate template_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw TemplateError("template", "must be a JSON object");
    static const char* const known[] = {
        "label", "truck_count", "station_count", "ports_min", "ports_max", "port_power",
        "electricity_price", "price_spread", "route_stations_min", "route_stations_max",
        "segment_min", "segment_max", "detour_min", "detour_max", "depart_min", "depart_max",
        "extra_time_budget", "w_hat", "truck", "max_retries"};
    for (const auto& item : j.items()) {
        if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
            throw TemplateError(item.key(), "unknown template field");
        }
    }
    ScenarioTemplate t;
    read_field(j, "label", t.label);
    read_field(j, "truck_count", t.truck_count);
    read_field(j, "station_count", t.station_count);
    read_field(j, "ports_min", t.ports_min);
    read_field(j, "ports_max", t.ports_max);
    read_field(j, "port_power", t.port_power);
    read_field(j, "electricity_price", t.electricity_price);
    read_field(j, "price_spread", t.price_spread);
    read_field(j, "route_stations_min", t.route_stations_min);
    read_field(j, "route_stations_max", t.route_stations_max);
    read_field(j, "segment_min", t.segment_min);
    read_field(j, "segment_max", t.segment_max);
    read_field(j, "detour_min", t.detour_min);
    read_field(j, "detour_max", t.detour_max);
    read_field(j, "depart_min", t.depart_min);
    read_field(j, "depart_max", t.depart_max);
    read_field(j, "extra_time_budget", t.extra_time_budget);
    read_field(j, "w_hat", t.w_hat);
    read_field(j, "max_retries", t.max_retries);
    if (j.contains("truck")) {
        const auto& p = j.at("truck");
        if (!p.is_object()) throw TemplateError("truck", "must be a JSON object");
        read_field(p, "p_bar", t.truck.p_bar);
        read_field(p, "e_full", t.truck.e_full);
        read_field(p, "e_safe", t.truck.e_safe);
        read_field(p, "p_max", t.truck.p_max);
        read_field(p, "kappa", t.truck.kappa);
        read_field(p, "rho", t.truck.rho);
    }
    validate_template(t);
    return t;
}

nlohmann::ordered_json to_json(const ScenarioTemplate& t) {
    nlohmann::ordered_json j;
    j["label"] = t.label;
    j["truck_count"] = t.truck_count;
    j["station_count"] = t.station_count;
    j["ports_min"] = t.ports_min;
    j["ports_max"] = t.ports_max;
    j["port_power"] = t.port_power;
    j["electricity_price"] = t.electricity_price;
    j["price_spread"] = t.price_spread;
    j["route_stations_min"] = t.route_stations_min;
    j["route_stations_max"] = t.route_stations_max;
    j["segment_min"] = t.segment_min;
    j["segment_max"] = t.segment_max;
    j["detour_min"] = t.detour_min;
    j["detour_max"] = t.detour_max;
    j["depart_min"] = t.depart_min;
    j["depart_max"] = t.depart_max;
    j["extra_time_budget"] = t.extra_time_budget;
    j["w_hat"] = t.w_hat;
    j["truck"] = to_json(t.truck);
    j["max_retries"] = t.max_retries;
    return j;
}

void validate_template(const ScenarioTemplate& t) {
    check(t.truck_count >= 0, "truck_count", "must be nonnegative");
    check(t.station_count >= 0, "station_count", "must be nonnegative");
    check(t.ports_min >= 1, "ports_min", "must be at least 1");
    check(t.ports_max >= t.ports_min, "ports_max", "must be at least ports_min");
    check(t.port_power > 0.0, "port_power", "must be positive");
    check(t.electricity_price >= 0.0, "electricity_price", "must be nonnegative");
    check(t.price_spread >= 0.0 && t.price_spread < 1.0, "price_spread", "must lie in [0, 1)");
    check(t.route_stations_min >= 0, "route_stations_min", "must be nonnegative");
    check(t.route_stations_max >= t.route_stations_min, "route_stations_max",
          "must be at least route_stations_min");
    check(t.route_stations_max <= static_cast<int>(kMaxPlannerStations), "route_stations_max",
          "exceeds the planner's station limit");
    check(t.segment_min >= 0.0, "segment_min", "must be nonnegative");
    check(t.segment_max >= t.segment_min, "segment_max", "must be at least segment_min");
    check(t.detour_min >= 0.0, "detour_min", "must be nonnegative");
    check(t.detour_max >= t.detour_min, "detour_max", "must be at least detour_min");
    check(t.depart_min >= 0.0, "depart_min", "must be nonnegative");
    check(t.depart_max >= t.depart_min, "depart_max", "must be at least depart_min");
    check(t.extra_time_budget >= 0.0, "extra_time_budget", "must be nonnegative");
    check(t.w_hat >= 0.0, "w_hat", "must be nonnegative");
    check(t.max_retries >= 1, "max_retries", "must be at least 1");
    const auto bad = validate_truck_params("truck", t.truck);
    if (!bad.empty()) throw TemplateError("truck", bad.front().message);
}

Scenario generate_scenario(const ScenarioTemplate& t, std::uint64_t seed) {
    validate_template(t);
    Sampler rng(seed);

    Scenario s;
    s.rng_seed = seed;
    s.label = t.label;
    const int station_width = id_width(t.station_count);
    for (int i = 0; i < t.station_count; ++i) {
        StationSpec st;
        st.id = padded_id('S', i + 1, station_width);
        st.port_count = rng.uniform_int(t.ports_min, t.ports_max);
        st.port_power = t.port_power;
        st.electricity_price_energy = t.price_spread > 0.0
            ? rng.uniform(t.electricity_price * (1.0 - t.price_spread),
                          t.electricity_price * (1.0 + t.price_spread))
            : t.electricity_price;
        s.stations.push_back(std::move(st));
    }

    const int truck_width = id_width(t.truck_count) + 1;
    const int route_max = std::min(t.route_stations_max, t.station_count);
    const int route_min = std::min(t.route_stations_min, route_max);
    std::vector<int> pool(static_cast<std::size_t>(t.station_count));

    for (int i = 0; i < t.truck_count; ++i) {
        TruckSpec truck;
        truck.id = padded_id('T', i + 1, truck_width);
        truck.params = t.truck;
        truck.extra_time_budget = t.extra_time_budget;
        truck.w_hat_default = t.w_hat;
        truck.depart_time = rng.uniform(t.depart_min, t.depart_max);

        bool accepted = false;
        for (int attempt = 0; attempt < t.max_retries && !accepted; ++attempt) {
            const int n = rng.uniform_int(route_min, route_max);
            for (int k = 0; k < t.station_count; ++k) pool[static_cast<std::size_t>(k)] = k;
            for (int k = 0; k < n; ++k) {
                const int pick = rng.uniform_int(k, t.station_count - 1);
                std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
            }
            std::vector<int> chosen(pool.begin(), pool.begin() + n);
            std::sort(chosen.begin(), chosen.end());
            if (rng.coin()) std::reverse(chosen.begin(), chosen.end());

            Route r;
            r.ramp_count = n;
            for (int k = 0; k <= n; ++k) r.segment_times.push_back(rng.uniform(t.segment_min, t.segment_max));
            for (int k = 0; k < n; ++k) {
                r.detour_times.push_back(rng.uniform(t.detour_min, t.detour_max));
                r.station_ids.push_back(s.stations[static_cast<std::size_t>(chosen[static_cast<std::size_t>(k)])].id);
            }
            const auto& p = truck.params;
            const Kwh lowest = n > 0 ? p.e_safe + p.p_bar * (r.segment_times[0] + r.detour_times[0])
                                     : p.e_safe + p.p_bar * r.segment_times[0];
            if (lowest > p.e_full) continue;
            truck.route = std::move(r);
            truck.e_initial = rng.uniform(lowest, p.e_full);

            std::vector<StationSpec> route_stations;
            for (const auto& sid : truck.route.station_ids) route_stations.push_back(*s.find_station(sid));
            accepted = solve_charging_problem(planner_input_at_origin(truck, route_stations)).status
                       == PlannerStatus::optimal;
        }
        if (!accepted) {
            throw TemplateError("max_retries", "no feasible route for truck " + truck.id + " after "
                                                   + std::to_string(t.max_retries) + " attempts");
        }
        s.trucks.push_back(std::move(truck));
    }
    return s;
}

}  // namespace fleetcharge
