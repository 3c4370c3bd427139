#include "fleetcharge/charge_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fleetcharge/lp_solver.hpp"

namespace fleetcharge {

namespace {

void require_plan_shape(const PlannerInput& input, const ChargingPlan& plan) {
    if (plan.decisions.size() != input.station_count()) {
        throw std::invalid_argument("plan covers " + std::to_string(plan.decisions.size())
                                    + " stations, route has "
                                    + std::to_string(input.station_count()));
    }
}

// Battery at the first remaining ramp (or the destination when none remain).
Kwh battery_at_first_ramp(const PlannerInput& in) { return in.battery - in.truck.p_bar * in.lead_time; }

Minutes fixed_travel(const PlannerInput& in) {
    return in.lead_time + std::accumulate(in.segment_times.begin(), in.segment_times.end(), 0.0);
}

struct LpLayout {
    std::vector<std::size_t> selected;  // station offsets with b = 1
    lp::Problem problem;
    bool has_deadline = false;
};

// Builds the continuous program in the charging durations of the selected
// stations. Every battery level is affine in those durations:
//   e_j = base_j + sum_{i<j, selected} rate_i * t_i.
LpLayout build_lp(const PlannerInput& in, const std::vector<bool>& charge, bool with_deadline) {
    const auto& p = in.truck;
    const std::size_t m = in.station_count();
    LpLayout out;
    for (std::size_t j = 0; j < m; ++j) {
        if (charge[j]) out.selected.push_back(j);
    }
    const std::size_t nsel = out.selected.size();
    const std::size_t nvars = nsel + (with_deadline ? 1 : 0);
    out.has_deadline = with_deadline;

    std::vector<double> energy_coef(nvars, 0.0);  // accumulated rate_i on t_i for i < j
    double base = battery_at_first_ramp(in);
    std::size_t var = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (charge[j] || in.reach_margin_at_every_ramp) {
            out.problem.add_ge(energy_coef, p.e_safe + p.p_bar * in.detour_times[j] - base);
        }
        if (charge[j]) {
            auto row = energy_coef;
            row[var] = in.rate_at(j);
            out.problem.add_le(row, p.e_full - base + p.p_bar * in.detour_times[j]);
            energy_coef[var] = in.rate_at(j);
            ++var;
        }
        base -= p.p_bar * ((charge[j] ? 2.0 * in.detour_times[j] : 0.0) + in.segment_times[j]);
    }
    out.problem.add_ge(energy_coef, p.e_safe - base);

    out.problem.cost.assign(nvars, 0.0);
    if (with_deadline) {
        double fixed = fixed_travel(in);
        std::vector<double> row(nvars, 1.0);
        for (std::size_t s = 0; s < nsel; ++s) {
            const std::size_t j = out.selected[s];
            fixed += 2.0 * in.detour_times[j] + in.wait_at(j);
            out.problem.cost[s] = p.kappa + electricity_price_per_minute(in.stations[j], p);
        }
        row[nsel] = -1.0;
        out.problem.add_le(row, in.remaining_time - fixed);
        out.problem.cost[nsel] = p.rho;
    }
    return out;
}

ChargingPlan plan_from(const std::vector<bool>& charge, const std::vector<Minutes>& durations) {
    ChargingPlan plan;
    plan.decisions.reserve(charge.size());
    for (std::size_t j = 0; j < charge.size(); ++j) {
        plan.decisions.push_back({static_cast<bool>(charge[j]), charge[j] ? durations[j] : 0.0});
    }
    return plan;
}

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

void validate_planner_input(const PlannerInput& in) {
    const std::size_t m = in.station_count();
    if (in.segment_times.size() != m) throw std::invalid_argument("segment_times must match stations");
    if (in.detour_times.size() != m) throw std::invalid_argument("detour_times must match stations");
    if (in.assumed_waits.size() != (m == 0 ? 0 : m - 1)) {
        throw std::invalid_argument("assumed_waits must cover the stations after the current one");
    }
    if (!(in.battery >= 0.0)) throw std::invalid_argument("battery must be nonnegative");
    if (!(in.quoted_wait >= 0.0)) throw std::invalid_argument("quoted_wait must be nonnegative");
    if (!(in.lead_time >= 0.0)) throw std::invalid_argument("lead_time must be nonnegative");
    for (double w : in.assumed_waits) {
        if (!(w >= 0.0)) throw std::invalid_argument("assumed waits must be nonnegative");
    }
    for (double t : in.segment_times) {
        if (!(t >= 0.0)) throw std::invalid_argument("segment times must be nonnegative");
    }
    for (double d : in.detour_times) {
        if (!(d >= 0.0)) throw std::invalid_argument("detour times must be nonnegative");
    }
    if (!validate_truck_params("truck", in.truck).empty()) {
        throw std::invalid_argument("truck parameters violate their invariants");
    }
    for (const auto& s : in.stations) {
        if (!validate_station(s).empty()) throw std::invalid_argument("station " + s.id + " is malformed");
    }
}

Minutes PlannerSolution::current_charge_time() const {
    if (status != PlannerStatus::optimal || plan.decisions.empty()) return 0.0;
    const auto& first = plan.decisions.front();
    return first.charge ? first.duration : 0.0;
}

std::string describe(const ConstraintViolation& v) {
    const char* what = "";
    switch (v.kind) {
        case ConstraintKind::reach_station: what = "battery at ramp cannot reach station"; break;
        case ConstraintKind::reach_destination: what = "battery at destination below e_safe"; break;
        case ConstraintKind::capacity: what = "charge exceeds battery capacity"; break;
        case ConstraintKind::nonnegative: what = "negative charging time"; break;
        case ConstraintKind::gating: what = "charging time without charging decision"; break;
    }
    return std::string(what) + " at station offset " + std::to_string(v.station) + " (by "
           + std::to_string(v.amount) + ")";
}

EnergyTrajectory compute_energy_trajectory(const PlannerInput& in, const ChargingPlan& plan) {
    require_plan_shape(in, plan);
    const auto& p = in.truck;
    EnergyTrajectory traj;
    traj.battery_at_ramp.reserve(in.station_count() + 1);
    traj.charge_added.reserve(in.station_count());

    Kwh e = battery_at_first_ramp(in);
    traj.battery_at_ramp.push_back(e);
    for (std::size_t j = 0; j < in.station_count(); ++j) {
        const auto& d = plan.decisions[j];
        const Kwh added = d.duration * in.rate_at(j);
        const double b = d.charge ? 1.0 : 0.0;
        traj.charge_added.push_back(added);
        e = e + b * added - p.p_bar * (2.0 * b * in.detour_times[j] + in.segment_times[j]);
        traj.battery_at_ramp.push_back(e);
    }
    return traj;
}

std::vector<ConstraintViolation> check_feasibility(const PlannerInput& in, const ChargingPlan& plan) {
    const auto traj = compute_energy_trajectory(in, plan);
    const auto& p = in.truck;
    const std::size_t m = in.station_count();
    std::vector<ConstraintViolation> out;

    for (std::size_t j = 0; j < m; ++j) {
        const auto& d = plan.decisions[j];
        const Kwh e = traj.battery_at_ramp[j];
        if (d.duration < -kFeasibilitySlack) {
            out.push_back({ConstraintKind::nonnegative, j, -d.duration});
        }
        if (!d.charge && d.duration != 0.0) {
            out.push_back({ConstraintKind::gating, j, std::abs(d.duration)});
        }
        if (d.charge || in.reach_margin_at_every_ramp) {
            const double need = p.e_safe + p.p_bar * in.detour_times[j];
            if (e < need - kFeasibilitySlack) out.push_back({ConstraintKind::reach_station, j, need - e});
        }
        if (d.charge) {
            const double room = p.e_full - (e - p.p_bar * in.detour_times[j]);
            if (traj.charge_added[j] > room + kFeasibilitySlack) {
                out.push_back({ConstraintKind::capacity, j, traj.charge_added[j] - room});
            }
        }
    }
    const Kwh last = traj.battery_at_ramp.back();
    if (last < p.e_safe - kFeasibilitySlack) {
        out.push_back({ConstraintKind::reach_destination, m, p.e_safe - last});
    }
    return out;
}

Minutes anticipated_overtime(const PlannerInput& in, const ChargingPlan& plan) {
    require_plan_shape(in, plan);
    Minutes planned = 0.0;
    for (std::size_t j = 0; j < in.station_count(); ++j) {
        const auto& d = plan.decisions[j];
        if (d.charge) planned += 2.0 * in.detour_times[j] + d.duration + in.wait_at(j);
    }
    return planned + fixed_travel(in) - in.remaining_time;
}

Euro plan_objective(const PlannerInput& in, const ChargingPlan& plan) {
    require_plan_shape(in, plan);
    const auto& p = in.truck;
    Minutes labor = 0.0;
    Euro electricity = 0.0;
    for (std::size_t j = 0; j < in.station_count(); ++j) {
        const auto& d = plan.decisions[j];
        if (!d.charge) continue;
        labor += 2.0 * in.detour_times[j] + d.duration + in.wait_at(j);
        electricity += electricity_price_per_minute(in.stations[j], p) * d.duration;
    }
    return p.kappa * labor + electricity + std::max(p.rho * anticipated_overtime(in, plan), 0.0);
}

bool provably_unreachable(const PlannerInput& in, const std::vector<bool>& charge) {
    const auto& p = in.truck;
    Kwh e = battery_at_first_ramp(in);
    for (std::size_t j = 0; j < in.station_count(); ++j) {
        const Minutes d = in.detour_times[j];
        if ((charge[j] || in.reach_margin_at_every_ramp)
            && e < p.e_safe + p.p_bar * d - kFeasibilitySlack) {
            return true;
        }
        // Filling up leaves e_full at the station, minus the drive back.
        if (charge[j]) e = std::max(e - p.p_bar * d, p.e_full) - p.p_bar * d;
        e -= p.p_bar * in.segment_times[j];
    }
    return e < p.e_safe - kFeasibilitySlack;
}

std::optional<FixedAssignmentResult> solve_fixed_assignment(const PlannerInput& in,
                                                            const std::vector<bool>& charge) {
    if (charge.size() != in.station_count()) {
        throw std::invalid_argument("assignment size does not match remaining stations");
    }
    const LpLayout layout = build_lp(in, charge, true);
    const lp::Result res = lp::solve(layout.problem);
    if (res.status != lp::Status::optimal) return std::nullopt;

    std::vector<Minutes> durations(in.station_count(), 0.0);
    for (std::size_t s = 0; s < layout.selected.size(); ++s) {
        durations[layout.selected[s]] = std::max(res.x[s], 0.0);
    }
    const ChargingPlan plan = plan_from(charge, durations);
    if (!check_feasibility(in, plan).empty()) return std::nullopt;

    FixedAssignmentResult out;
    out.durations = std::move(durations);
    out.objective = plan_objective(in, plan);
    return out;
}

PlannerSolution solve_charging_problem(const PlannerInput& in) {
    validate_planner_input(in);
    const std::size_t m = in.station_count();
    if (m > kMaxPlannerStations) {
        throw RouteTooLongError("planner supports at most " + std::to_string(kMaxPlannerStations)
                                + " remaining stations, got " + std::to_string(m));
    }

    struct Candidate {
        std::vector<bool> charge;
        FixedAssignmentResult result;
        std::size_t stops = 0;
        Minutes total_time = 0.0;
    };
    std::optional<Candidate> best;

    auto better = [](const Candidate& a, const Candidate& b) {
        if (!nearly_equal(a.result.objective, b.result.objective)) {
            return a.result.objective < b.result.objective;
        }
        if (a.stops != b.stops) return a.stops < b.stops;
        if (a.charge != b.charge) return a.charge < b.charge;
        return a.total_time < b.total_time;
    };

    const std::size_t count = std::size_t{1} << m;
    std::vector<bool> charge(m);
    for (std::size_t mask = 0; mask < count; ++mask) {
        // Station 0 is the most significant bit, so masks ascend in
        // lexicographic order of the assignment.
        for (std::size_t j = 0; j < m; ++j) charge[j] = ((mask >> (m - 1 - j)) & 1U) != 0;
        if (provably_unreachable(in, charge)) continue;
        auto result = solve_fixed_assignment(in, charge);
        if (!result) continue;

        Candidate cand{charge, std::move(*result), 0, 0.0};
        cand.stops = static_cast<std::size_t>(std::count(charge.begin(), charge.end(), true));
        cand.total_time = std::accumulate(cand.result.durations.begin(), cand.result.durations.end(), 0.0);
        if (!best || better(cand, *best)) best = std::move(cand);
    }

    PlannerSolution sol;
    if (!best) {
        sol.status = PlannerStatus::infeasible;
        sol.objective = std::numeric_limits<double>::infinity();
        sol.plan = plan_from(std::vector<bool>(m, false), std::vector<Minutes>(m, 0.0));
        sol.plan.anticipated_overtime = anticipated_overtime(in, sol.plan);
        sol.plan.anticipated_cost = sol.objective;
        sol.trajectory = compute_energy_trajectory(in, sol.plan);
        return sol;
    }
    sol.status = PlannerStatus::optimal;
    sol.plan = plan_from(best->charge, best->result.durations);
    sol.objective = best->result.objective;
    sol.plan.anticipated_cost = sol.objective;
    sol.plan.anticipated_overtime = anticipated_overtime(in, sol.plan);
    sol.trajectory = compute_energy_trajectory(in, sol.plan);
    return sol;
}

std::optional<Minutes> minimal_charge_here(const PlannerInput& in) {
    const std::size_t m = in.station_count();
    if (m == 0) return std::nullopt;
    std::vector<bool> charge(m, false);
    charge[0] = true;
    LpLayout layout = build_lp(in, charge, false);
    layout.problem.cost = {1.0};
    const lp::Result res = lp::solve(layout.problem);
    if (res.status != lp::Status::optimal) return std::nullopt;
    std::vector<Minutes> durations(m, 0.0);
    durations[0] = std::max(res.x[0], 0.0);
    if (!check_feasibility(in, plan_from(charge, durations)).empty()) return std::nullopt;
    return durations[0];
}

nlohmann::ordered_json to_json(const PlannerInput& in) {
    nlohmann::ordered_json j;
    j["truck"] = to_json(in.truck);
    j["lead_time"] = in.lead_time;
    j["segment_times"] = in.segment_times;
    j["detour_times"] = in.detour_times;
    j["stations"] = nlohmann::ordered_json::array();
    for (const auto& s : in.stations) j["stations"].push_back(to_json(s));
    j["battery"] = in.battery;
    j["quoted_wait"] = in.quoted_wait;
    j["assumed_waits"] = in.assumed_waits;
    j["remaining_time"] = in.remaining_time;
    j["reach_margin_at_every_ramp"] = in.reach_margin_at_every_ramp;
    return j;
}

PlannerInput planner_input_from_json(const nlohmann::json& j) {
    PlannerInput in;
    in.truck = truck_params_from_json(j.at("truck"));
    in.lead_time = j.value("lead_time", 0.0);
    in.segment_times = j.at("segment_times").get<std::vector<double>>();
    in.detour_times = j.at("detour_times").get<std::vector<double>>();
    for (const auto& s : j.at("stations")) in.stations.push_back(station_from_json(s));
    in.battery = j.at("battery").get<double>();
    in.quoted_wait = j.at("quoted_wait").get<double>();
    in.assumed_waits = j.at("assumed_waits").get<std::vector<double>>();
    in.remaining_time = j.at("remaining_time").get<double>();
    in.reach_margin_at_every_ramp = j.value("reach_margin_at_every_ramp", true);
    return in;
}

nlohmann::ordered_json to_json(const PlannerSolution& sol) {
    nlohmann::ordered_json j;
    j["status"] = sol.status == PlannerStatus::optimal ? "optimal" : "infeasible";
    if (sol.status == PlannerStatus::optimal) {
        j["objective"] = sol.objective;
    } else {
        j["objective"] = nullptr;
    }
    j["anticipated_overtime"] = sol.plan.anticipated_overtime;
    j["decisions"] = nlohmann::ordered_json::array();
    for (const auto& d : sol.plan.decisions) {
        nlohmann::ordered_json row;
        row["charge"] = d.charge;
        row["duration"] = d.duration;
        j["decisions"].push_back(std::move(row));
    }
    j["battery_at_ramp"] = sol.trajectory.battery_at_ramp;
    j["charge_added"] = sol.trajectory.charge_added;
    return j;
}

}  // namespace fleetcharge
