#pragma once

// Truck-side charging planner.
//
// At ramp r_k the truck decides, for every remaining station S_k..S_N,
// whether to charge there (b) and for how long (t). Energy evolves as
//     e_{l+1} = e_l + b_l * rate_l * t_l - p_bar * (2 b_l d_l + tau_l)
// and must stay above e_safe + p_bar * d_l at each ramp and above e_safe at
// the destination; a single charge may not overfill the battery. The cost is
// labor for detours, waits and charging, electricity per charging minute,
// and a linear penalty on deadline overtime.
//
// The program is solved exactly: every binary assignment that survives a
// full-charge reachability test is handed to a small LP in the durations.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetcharge/core_model.hpp"

namespace fleetcharge {

inline constexpr std::size_t kMaxPlannerStations = 16;
inline constexpr double kFeasibilitySlack = 1e-6;

struct PlannerInput {
    TruckParams truck;
    // Travel from the truck's position to the first remaining ramp (zero when
    // planning at a ramp; tau_0 when planning at the origin).
    Minutes lead_time = 0.0;
    std::vector<Minutes> segment_times;   // tau_k..tau_N
    std::vector<Minutes> detour_times;    // d_k..d_N
    std::vector<StationSpec> stations;    // S_k..S_N
    Kwh battery = 0.0;
    Minutes quoted_wait = 0.0;            // from S_k
    std::vector<Minutes> assumed_waits;   // for S_{k+1}..S_N
    Minutes remaining_time = 0.0;         // deadline minus now
    // Enforce the station-reach margin at ramps the truck drives past
    // without charging.
    bool reach_margin_at_every_ramp = true;

    std::size_t station_count() const { return stations.size(); }
    Minutes wait_at(std::size_t j) const { return j == 0 ? quoted_wait : assumed_waits.at(j - 1); }
    double rate_at(std::size_t j) const {
        return charge_rate_per_minute(stations[j].port_power, truck.p_max);
    }
};

/// Throws std::invalid_argument describing the first malformed field.
void validate_planner_input(const PlannerInput& input);

struct EnergyTrajectory {
    std::vector<Kwh> battery_at_ramp;  // e_k..e_N, then e_{N+1}
    std::vector<Kwh> charge_added;     // delta e_k..delta e_N

    bool operator==(const EnergyTrajectory&) const = default;
};

enum class PlannerStatus { optimal, infeasible };

struct PlannerSolution {
    ChargingPlan plan;
    EnergyTrajectory trajectory;
    Euro objective = 0.0;
    PlannerStatus status = PlannerStatus::infeasible;

    /// b_k* x t_k*, the charging time announced to the current station.
    Minutes current_charge_time() const;
};

enum class ConstraintKind { reach_station, reach_destination, capacity, nonnegative, gating };

struct ConstraintViolation {
    ConstraintKind kind;
    std::size_t station = 0;  // offset from k; station_count() for the destination
    double amount = 0.0;      // how far the inequality is missed

    bool operator==(const ConstraintViolation&) const = default;
};

std::string describe(const ConstraintViolation& v);

class RouteTooLongError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

EnergyTrajectory compute_energy_trajectory(const PlannerInput& input, const ChargingPlan& plan);
std::vector<ConstraintViolation> check_feasibility(const PlannerInput& input, const ChargingPlan& plan);
Minutes anticipated_overtime(const PlannerInput& input, const ChargingPlan& plan);

/// Full cost of a plan, including the constant detour and wait labor terms.
Euro plan_objective(const PlannerInput& input, const ChargingPlan& plan);

struct FixedAssignmentResult {
    std::vector<Minutes> durations;  // one per remaining station, zero where b is false
    Euro objective = 0.0;
};

std::optional<FixedAssignmentResult> solve_fixed_assignment(const PlannerInput& input,
                                                            const std::vector<bool>& charge);

/// Charging every selected station to full still violates a reach bound.
bool provably_unreachable(const PlannerInput& input, const std::vector<bool>& charge);

PlannerSolution solve_charging_problem(const PlannerInput& input);

/// Smallest charge at the current station alone that makes the rest of the
/// route energy-feasible, ignoring the deadline.
std::optional<Minutes> minimal_charge_here(const PlannerInput& input);

nlohmann::ordered_json to_json(const PlannerInput& input);
PlannerInput planner_input_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const PlannerSolution& solution);

}  // namespace fleetcharge
