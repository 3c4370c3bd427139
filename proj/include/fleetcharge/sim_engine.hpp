#pragma once

// Deterministic discrete-event simulation of a truck fleet.
//
// Two strategies share one executor:
//  - proposed: at every ramp the truck runs the four-step exchange with the
//    ramp's station, replans the whole remaining route with the quoted wait,
//    and executes only the decision for the current station;
//  - offline: each truck plans once at its origin assuming no waiting
//    anywhere and then joins station queues on physical arrival.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetcharge/charge_planner.hpp"
#include "fleetcharge/core_model.hpp"
#include "fleetcharge/protocol.hpp"
#include "fleetcharge/station_scheduler.hpp"

namespace fleetcharge {

enum class Strategy { proposed, offline };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

enum class EventKind { ramp_arrival = 0, station_arrival = 1, destination_arrival = 2 };

struct Event {
    Minutes time = 0.0;
    TruckId truck;
    EventKind kind = EventKind::ramp_arrival;
    int ramp = 0;

    /// Total order on (time, truck id, kind rank).
    bool operator<(const Event& other) const;
};

struct StationVisit {
    StationId station;
    int ramp = 0;
    Minutes t_arrival = 0.0;  // anticipated or physical arrival at the station
    Minutes quoted_wait = 0.0;
    Minutes realized_wait = 0.0;
    Minutes charge_time = 0.0;
    bool charged = false;
    Kwh battery_before = 0.0;  // at the ramp
    Kwh battery_after = 0.0;   // back at the ramp
    Kwh charge_added = 0.0;
};

struct TripRecord {
    TruckId truck;
    std::vector<StationVisit> visits;
    Minutes arrival_time = 0.0;
    Kwh residual_battery = 0.0;
    Minutes deadline_violation = 0.0;
    bool stranded = false;
    Kwh e_initial = 0.0;
    Kwh e_safe = 0.0;
    Kwh e_full = 0.0;
    Minutes drive_minutes = 0.0;           // main route plus detours actually driven
    std::vector<Kwh> battery_at_ramps;     // on first arrival at each reached ramp

    Minutes total_wait() const;
    Minutes total_charge_time() const;
    Kwh total_charge_added() const;
    bool charged_at_least_once() const;
};

struct StationTotals {
    StationId station;
    Minutes charging_minutes = 0.0;
    Minutes waiting_minutes = 0.0;
    int charging_visits = 0;
    Minutes mean_wait = 0.0;
};

struct RunMetrics {
    std::string label;
    Strategy strategy = Strategy::proposed;
    double total_waiting_hours = 0.0;
    std::vector<StationTotals> stations;
    std::vector<TripRecord> trips;
    int deadline_violations = 0;
    int stranded_trucks = 0;
};

struct RunResult {
    RunMetrics metrics;
    ExchangeLog exchanges;
    std::vector<PortLedger> ledgers;  // scenario station order
};

/// Raised when a run starts from a scenario that fails validation.
class InvalidScenarioError : public std::invalid_argument {
public:
    InvalidScenarioError(const std::string& what, std::vector<Violation> violations)
        : std::invalid_argument(what), violations_(std::move(violations)) {}
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

RunResult run_proposed(const Scenario& scenario, const Planner& planner = solve_charging_problem);
RunResult run_offline_baseline(const Scenario& scenario);
RunResult run_strategy(const Scenario& scenario, Strategy strategy);

/// Runs independent scenarios on up to `workers` threads (0 = hardware
/// concurrency). Runs share no mutable state; results keep input order.
std::vector<RunResult> run_batch(const std::vector<Scenario>& scenarios, Strategy strategy,
                                 unsigned workers = 0);

/// Post-run invariant checks: ledger audits, one well-formed exchange per
/// ramp arrival, quoted-wait exactness (proposed runs), energy conservation
/// and realized safety margins for trucks that were not stranded.
std::vector<std::string> audit_run(const Scenario& scenario, const RunResult& run);

/// Origin-time planner input with zero waits everywhere.
PlannerInput planner_input_at_origin(const TruckSpec& truck, std::span<const StationSpec> route_stations);

/// Sums the per-trip records into station totals and fleet aggregates.
RunMetrics aggregate(const std::string& label, Strategy strategy, const Scenario& scenario,
                     std::vector<TripRecord> trips);

struct TruckComparison {
    TruckId truck;
    Minutes wait_a = 0.0;
    Minutes wait_b = 0.0;
    Minutes charge_a = 0.0;
    Minutes charge_b = 0.0;
    Minutes violation_a = 0.0;
    Minutes violation_b = 0.0;
};

struct StationComparison {
    StationId station;
    StationTotals a;
    StationTotals b;
};

struct ComparisonReport {
    std::string label;
    std::vector<TruckComparison> trucks;
    std::vector<StationComparison> stations;
    double total_wait_hours_a = 0.0;
    double total_wait_hours_b = 0.0;
    double reduction_percent = 0.0;  // of b relative to a
    int violations_a = 0;
    int violations_b = 0;
};

class ScenarioMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Compares run `b` against reference run `a` (normally offline vs proposed).
ComparisonReport compare(const RunMetrics& a, const RunMetrics& b);

/// (a - b) / a in percent; zero when a is zero.
double reduction_percent(double a, double b);

nlohmann::ordered_json to_json(const RunMetrics& m);
RunMetrics metrics_from_json(const nlohmann::json& j);

}  // namespace fleetcharge
