#include "fleetcharge/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <queue>
#include <thread>
#include <unordered_map>

namespace fleetcharge {

namespace {

struct Later {
    bool operator()(const Event& a, const Event& b) const { return b < a; }
};

struct TruckRuntime {
    const TruckSpec* spec = nullptr;
    std::vector<StationSpec> route_stations;
    std::vector<std::size_t> ledger_of_ramp;  // index into the run's ledgers
    TruckState state;
    TripRecord trip;
    ChargingPlan offline_plan;
    StationVisit pending;  // offline: visit between ramp and station arrival
};

// End of the last booking on `port` made before log entry `index`; the
// moment the port becomes free for that booking.
Minutes port_free_before(const PortLedger& ledger, std::size_t index) {
    const auto& log = ledger.assignments();
    const int port = log[index].port;
    Minutes free_at = 0.0;
    for (std::size_t i = 0; i < index; ++i) {
        if (log[i].port == port) free_at = std::max(free_at, log[i].end());
    }
    return free_at;
}

class Engine {
public:
    Engine(const Scenario& scenario, Strategy strategy, Planner planner)
        : scenario_(scenario), strategy_(strategy), planner_(std::move(planner)) {
        auto violations = validate_scenario(scenario);
        if (!violations.empty()) {
            throw InvalidScenarioError("scenario " + scenario.label + " fails validation",
                                       std::move(violations));
        }
        std::unordered_map<StationId, std::size_t> station_index;
        for (std::size_t i = 0; i < scenario.stations.size(); ++i) {
            const auto& s = scenario.stations[i];
            station_index.emplace(s.id, i);
            result_.ledgers.emplace_back(s.id, s.port_count);
        }
        trucks_.reserve(scenario.trucks.size());
        for (std::size_t i = 0; i < scenario.trucks.size(); ++i) {
            const TruckSpec& spec = scenario.trucks[i];
            TruckRuntime rt;
            rt.spec = &spec;
            for (const auto& sid : spec.route.station_ids) {
                const std::size_t idx = station_index.at(sid);
                rt.route_stations.push_back(scenario.stations[idx]);
                rt.ledger_of_ramp.push_back(idx);
            }
            truck_index_.emplace(spec.id, i);
            trucks_.push_back(std::move(rt));
        }
    }

    RunResult run() {
        for (auto& rt : trucks_) depart(rt);
        while (!queue_.empty()) {
            const Event ev = queue_.top();
            queue_.pop();
            TruckRuntime& rt = trucks_[truck_index_.at(ev.truck)];
            switch (ev.kind) {
                case EventKind::ramp_arrival:
                    if (strategy_ == Strategy::proposed) {
                        proposed_ramp(rt, ev.ramp);
                    } else {
                        offline_ramp(rt, ev.ramp);
                    }
                    break;
                case EventKind::station_arrival: offline_station(rt, ev.ramp); break;
                case EventKind::destination_arrival: arrive(rt); break;
            }
        }
        std::vector<TripRecord> trips;
        trips.reserve(trucks_.size());
        for (auto& rt : trucks_) trips.push_back(std::move(rt.trip));
        result_.metrics = aggregate(scenario_.label, strategy_, scenario_, std::move(trips));
        return std::move(result_);
    }

private:
    void depart(TruckRuntime& rt) {
        const TruckSpec& spec = *rt.spec;
        const Route& route = spec.route;
        rt.trip.truck = spec.id;
        rt.trip.e_initial = spec.e_initial;
        rt.trip.e_safe = spec.params.e_safe;
        rt.trip.e_full = spec.params.e_full;
        rt.state.deadline = spec.deadline();
        rt.state.clock = spec.depart_time;
        rt.state.battery = spec.e_initial;

        if (strategy_ == Strategy::offline) {
            const PlannerInput in = planner_input_at_origin(spec, rt.route_stations);
            const PlannerSolution sol = solve_charging_problem(in);
            if (sol.status != PlannerStatus::optimal) {
                strand(rt);
                return;
            }
            rt.offline_plan = sol.plan;
        }
        drive(rt, route.segment_times[0]);
        rt.state.next_ramp = 1;
        schedule_next(rt);
    }

    void drive(TruckRuntime& rt, Minutes minutes) {
        rt.state.clock += minutes;
        rt.state.battery -= rt.spec->params.p_bar * minutes;
        rt.trip.drive_minutes += minutes;
    }

    void schedule_next(TruckRuntime& rt) {
        const int n = rt.spec->route.ramp_count;
        if (rt.state.next_ramp <= n) {
            queue_.push({rt.state.clock, rt.spec->id, EventKind::ramp_arrival, rt.state.next_ramp});
        } else {
            queue_.push({rt.state.clock, rt.spec->id, EventKind::destination_arrival, n + 1});
        }
    }

    // Continues along tau_k to the next ramp or the destination.
    void leave_ramp(TruckRuntime& rt, int ramp) {
        drive(rt, rt.spec->route.segment_times[static_cast<std::size_t>(ramp)]);
        rt.state.next_ramp = ramp + 1;
        schedule_next(rt);
    }

    // Detour out, wait for the booked port, charge, detour back. The wait is
    // measured against the port's previous booking, independently of the quote.
    void charge_at_station(TruckRuntime& rt, int ramp, PortLedger& ledger, std::size_t booking,
                           bool at_station, StationVisit& visit) {
        const TruckParams& p = rt.spec->params;
        const Minutes detour = rt.spec->route.detour_times[static_cast<std::size_t>(ramp - 1)];
        if (!at_station) drive(rt, detour);
        const Minutes arrival = rt.state.clock;
        const Minutes wait = std::max(port_free_before(ledger, booking) - arrival, 0.0);
        const Minutes duration = ledger.assignments()[booking].duration;
        rt.state.clock = arrival + wait + duration;

        const double rate = charge_rate_per_minute(rt.route_stations[static_cast<std::size_t>(ramp - 1)].port_power,
                                                   p.p_max);
        const Kwh added = std::clamp(rate * duration, 0.0, std::max(p.e_full - rt.state.battery, 0.0));
        rt.state.battery += added;
        drive(rt, detour);

        visit.charged = true;
        visit.realized_wait = wait;
        visit.charge_time = duration;
        visit.charge_added = added;
    }

    void proposed_ramp(TruckRuntime& rt, int ramp) {
        rt.trip.battery_at_ramps.push_back(rt.state.battery);
        const auto offset = static_cast<std::size_t>(ramp - 1);
        PortLedger& ledger = result_.ledgers[rt.ledger_of_ramp[offset]];
        const ExchangeResult ex = run_ramp_exchange(*rt.spec, rt.state, rt.route_stations, ledger,
                                                    planner_, result_.exchanges);

        StationVisit visit;
        visit.station = ledger.station_id();
        visit.ramp = ramp;
        visit.t_arrival = ex.transcript.arrival.arrival;
        visit.quoted_wait = ex.quote.wait;
        visit.battery_before = rt.state.battery;

        if (ex.transcript.outcome == ExchangeOutcome::stranded) {
            visit.battery_after = rt.state.battery;
            rt.trip.visits.push_back(visit);
            strand(rt);
            return;
        }
        if (ex.transcript.commitment.charge_time > 0.0) {
            charge_at_station(rt, ramp, ledger, ledger.assignments().size() - 1, false, visit);
        }
        visit.battery_after = rt.state.battery;
        rt.trip.visits.push_back(visit);
        leave_ramp(rt, ramp);
    }

    void offline_ramp(TruckRuntime& rt, int ramp) {
        rt.trip.battery_at_ramps.push_back(rt.state.battery);
        const auto offset = static_cast<std::size_t>(ramp - 1);
        const ChargeDecision& decision = rt.offline_plan.decisions[offset];

        StationVisit visit;
        visit.station = rt.route_stations[offset].id;
        visit.ramp = ramp;
        visit.battery_before = rt.state.battery;
        visit.t_arrival = rt.state.clock + rt.spec->route.detour_times[offset];

        if (decision.charge && decision.duration > 0.0) {
            rt.pending = visit;
            drive(rt, rt.spec->route.detour_times[offset]);
            queue_.push({rt.state.clock, rt.spec->id, EventKind::station_arrival, ramp});
            return;
        }
        visit.battery_after = rt.state.battery;
        rt.trip.visits.push_back(visit);
        leave_ramp(rt, ramp);
    }

    // Offline trucks join the queue when they physically reach the station.
    void offline_station(TruckRuntime& rt, int ramp) {
        const auto offset = static_cast<std::size_t>(ramp - 1);
        PortLedger& ledger = result_.ledgers[rt.ledger_of_ramp[offset]];
        StationVisit visit = rt.pending;
        const WaitQuote quote = ledger.estimate_wait(rt.state.clock);
        ledger.commit(quote, rt.spec->id, rt.offline_plan.decisions[offset].duration);
        visit.quoted_wait = quote.wait;
        charge_at_station(rt, ramp, ledger, ledger.assignments().size() - 1, true, visit);
        visit.battery_after = rt.state.battery;
        rt.trip.visits.push_back(visit);
        leave_ramp(rt, ramp);
    }

    void arrive(TruckRuntime& rt) {
        rt.trip.arrival_time = rt.state.clock;
        rt.trip.residual_battery = rt.state.battery;
        rt.trip.deadline_violation = std::max(rt.state.clock - rt.state.deadline, 0.0);
    }

    void strand(TruckRuntime& rt) {
        rt.trip.stranded = true;
        rt.trip.arrival_time = rt.state.clock;
        rt.trip.residual_battery = rt.state.battery;
        rt.trip.deadline_violation = 0.0;
    }

    const Scenario& scenario_;
    Strategy strategy_;
    Planner planner_;
    std::vector<TruckRuntime> trucks_;
    std::unordered_map<TruckId, std::size_t> truck_index_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    RunResult result_;
};

}  // namespace

std::string to_string(Strategy s) { return s == Strategy::proposed ? "proposed" : "offline"; }

Strategy strategy_from_string(const std::string& s) {
    if (s == "proposed") return Strategy::proposed;
    if (s == "offline") return Strategy::offline;
    throw std::invalid_argument("unknown strategy '" + s + "'");
}

bool Event::operator<(const Event& other) const {
    if (time != other.time) return time < other.time;
    if (truck != other.truck) return truck < other.truck;
    return static_cast<int>(kind) < static_cast<int>(other.kind);
}

Minutes TripRecord::total_wait() const {
    Minutes sum = 0.0;
    for (const auto& v : visits) sum += v.realized_wait;
    return sum;
}

Minutes TripRecord::total_charge_time() const {
    Minutes sum = 0.0;
    for (const auto& v : visits) sum += v.charge_time;
    return sum;
}

Kwh TripRecord::total_charge_added() const {
    Kwh sum = 0.0;
    for (const auto& v : visits) sum += v.charge_added;
    return sum;
}

bool TripRecord::charged_at_least_once() const {
    return std::any_of(visits.begin(), visits.end(), [](const StationVisit& v) { return v.charged; });
}

PlannerInput planner_input_at_origin(const TruckSpec& truck, std::span<const StationSpec> route_stations) {
    const Route& r = truck.route;
    PlannerInput in;
    in.truck = truck.params;
    in.lead_time = r.segment_times.empty() ? 0.0 : r.segment_times[0];
    in.battery = truck.e_initial;
    in.quoted_wait = 0.0;
    in.remaining_time = truck.deadline() - truck.depart_time;
    for (std::size_t l = 0; l < static_cast<std::size_t>(r.ramp_count); ++l) {
        in.segment_times.push_back(r.segment_times[l + 1]);
        in.detour_times.push_back(r.detour_times[l]);
        in.stations.push_back(route_stations[l]);
        if (l > 0) in.assumed_waits.push_back(0.0);
    }
    return in;
}

RunMetrics aggregate(const std::string& label, Strategy strategy, const Scenario& scenario,
                     std::vector<TripRecord> trips) {
    RunMetrics m;
    m.label = label;
    m.strategy = strategy;
    std::unordered_map<StationId, std::size_t> index;
    for (const auto& s : scenario.stations) {
        index.emplace(s.id, m.stations.size());
        m.stations.push_back({s.id, 0.0, 0.0, 0, 0.0});
    }
    Minutes total_wait = 0.0;
    for (const auto& trip : trips) {
        for (const auto& v : trip.visits) {
            if (!v.charged) continue;
            StationTotals& st = m.stations[index.at(v.station)];
            st.charging_minutes += v.charge_time;
            st.waiting_minutes += v.realized_wait;
            ++st.charging_visits;
        }
        total_wait += trip.total_wait();
        if (trip.deadline_violation > 0.0) ++m.deadline_violations;
        if (trip.stranded) ++m.stranded_trucks;
    }
    for (auto& st : m.stations) {
        st.mean_wait = st.charging_visits > 0 ? st.waiting_minutes / st.charging_visits : 0.0;
    }
    m.total_waiting_hours = total_wait / 60.0;
    m.trips = std::move(trips);
    return m;
}

RunResult run_proposed(const Scenario& scenario, const Planner& planner) {
    return Engine(scenario, Strategy::proposed, planner).run();
}

RunResult run_offline_baseline(const Scenario& scenario) {
    return Engine(scenario, Strategy::offline, solve_charging_problem).run();
}

RunResult run_strategy(const Scenario& scenario, Strategy strategy) {
    return strategy == Strategy::proposed ? run_proposed(scenario) : run_offline_baseline(scenario);
}

std::vector<RunResult> run_batch(const std::vector<Scenario>& scenarios, Strategy strategy,
                                 unsigned workers) {
    std::vector<RunResult> results(scenarios.size());
    if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, scenarios.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) {
            results[i] = run_strategy(scenarios[i], strategy);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return results;
}

std::vector<std::string> audit_run(const Scenario& scenario, const RunResult& run) {
    constexpr double kTol = 1e-6;
    std::vector<std::string> out;
    for (const auto& l : run.ledgers) {
        for (const auto& v : l.audit()) out.push_back(v.entity + ": " + v.message);
    }

    std::size_t ramp_arrivals = 0;
    for (const auto& trip : run.metrics.trips) ramp_arrivals += trip.visits.size();
    if (run.metrics.strategy == Strategy::proposed) {
        if (run.exchanges.transcripts().size() != ramp_arrivals) {
            out.push_back("exchange count " + std::to_string(run.exchanges.transcripts().size())
                          + " differs from ramp arrivals " + std::to_string(ramp_arrivals));
        }
        for (const auto& t : run.exchanges.transcripts()) {
            for (auto& msg : check_transcript(t)) out.push_back(std::move(msg));
        }
    }

    std::unordered_map<TruckId, const TruckSpec*> specs;
    for (const auto& t : scenario.trucks) specs.emplace(t.id, &t);
    for (const auto& trip : run.metrics.trips) {
        const TruckSpec& spec = *specs.at(trip.truck);
        const auto& p = spec.params;
        for (const auto& v : trip.visits) {
            if (run.metrics.strategy == Strategy::proposed && v.charged
                && v.realized_wait != v.quoted_wait) {
                out.push_back("truck " + trip.truck + " at " + v.station
                              + ": realized wait differs from quote");
            }
        }
        if (trip.stranded) continue;
        const Kwh expected = trip.e_initial + trip.total_charge_added() - p.p_bar * trip.drive_minutes;
        if (std::abs(expected - trip.residual_battery) > kTol) {
            out.push_back("truck " + trip.truck + ": energy balance off by "
                          + std::to_string(expected - trip.residual_battery));
        }
        for (std::size_t k = 0; k < trip.battery_at_ramps.size(); ++k) {
            if (trip.battery_at_ramps[k] < p.e_safe + p.p_bar * spec.route.detour_times[k] - kTol) {
                out.push_back("truck " + trip.truck + ": below reach margin at ramp "
                              + std::to_string(k + 1));
            }
        }
        if (trip.residual_battery < p.e_safe - kTol) {
            out.push_back("truck " + trip.truck + ": arrived below e_safe");
        }
    }
    return out;
}

double reduction_percent(double a, double b) { return a > 0.0 ? (a - b) / a * 100.0 : 0.0; }

ComparisonReport compare(const RunMetrics& a, const RunMetrics& b) {
    if (a.label != b.label) {
        throw ScenarioMismatchError("cannot compare runs of scenarios '" + a.label + "' and '"
                                    + b.label + "'");
    }
    ComparisonReport r;
    r.label = a.label;
    std::unordered_map<TruckId, const TripRecord*> b_trips;
    for (const auto& t : b.trips) b_trips.emplace(t.truck, &t);
    if (a.trips.size() != b.trips.size()) throw ScenarioMismatchError("runs cover different trucks");
    for (const auto& ta : a.trips) {
        const auto it = b_trips.find(ta.truck);
        if (it == b_trips.end()) throw ScenarioMismatchError("truck " + ta.truck + " missing from second run");
        const TripRecord& tb = *it->second;
        r.trucks.push_back({ta.truck, ta.total_wait(), tb.total_wait(), ta.total_charge_time(),
                            tb.total_charge_time(), ta.deadline_violation, tb.deadline_violation});
    }
    std::unordered_map<StationId, const StationTotals*> b_stations;
    for (const auto& s : b.stations) b_stations.emplace(s.station, &s);
    for (const auto& sa : a.stations) {
        const auto it = b_stations.find(sa.station);
        if (it == b_stations.end()) throw ScenarioMismatchError("station " + sa.station + " missing from second run");
        r.stations.push_back({sa.station, sa, *it->second});
    }
    r.total_wait_hours_a = a.total_waiting_hours;
    r.total_wait_hours_b = b.total_waiting_hours;
    r.reduction_percent = reduction_percent(a.total_waiting_hours, b.total_waiting_hours);
    r.violations_a = a.deadline_violations;
    r.violations_b = b.deadline_violations;
    return r;
}

nlohmann::ordered_json to_json(const RunMetrics& m) {
    nlohmann::ordered_json j;
    j["label"] = m.label;
    j["strategy"] = to_string(m.strategy);
    j["total_waiting_hours"] = m.total_waiting_hours;
    j["deadline_violations"] = m.deadline_violations;
    j["stranded_trucks"] = m.stranded_trucks;
    j["stations"] = nlohmann::ordered_json::array();
    for (const auto& s : m.stations) {
        nlohmann::ordered_json row;
        row["station"] = s.station;
        row["charging_minutes"] = s.charging_minutes;
        row["waiting_minutes"] = s.waiting_minutes;
        row["charging_visits"] = s.charging_visits;
        row["mean_wait"] = s.mean_wait;
        j["stations"].push_back(std::move(row));
    }
    j["trips"] = nlohmann::ordered_json::array();
    for (const auto& t : m.trips) {
        nlohmann::ordered_json row;
        row["truck"] = t.truck;
        row["arrival_time"] = t.arrival_time;
        row["residual_battery"] = t.residual_battery;
        row["deadline_violation"] = t.deadline_violation;
        row["stranded"] = t.stranded;
        row["e_initial"] = t.e_initial;
        row["e_safe"] = t.e_safe;
        row["e_full"] = t.e_full;
        row["drive_minutes"] = t.drive_minutes;
        row["battery_at_ramps"] = t.battery_at_ramps;
        row["visits"] = nlohmann::ordered_json::array();
        for (const auto& v : t.visits) {
            nlohmann::ordered_json vr;
            vr["station"] = v.station;
            vr["ramp"] = v.ramp;
            vr["t_arrival"] = v.t_arrival;
            vr["quoted_wait"] = v.quoted_wait;
            vr["realized_wait"] = v.realized_wait;
            vr["charge_time"] = v.charge_time;
            vr["charged"] = v.charged;
            vr["battery_before"] = v.battery_before;
            vr["battery_after"] = v.battery_after;
            vr["charge_added"] = v.charge_added;
            row["visits"].push_back(std::move(vr));
        }
        j["trips"].push_back(std::move(row));
    }
    return j;
}

RunMetrics metrics_from_json(const nlohmann::json& j) {
    RunMetrics m;
    m.label = j.at("label").get<std::string>();
    m.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    m.total_waiting_hours = j.at("total_waiting_hours").get<double>();
    m.deadline_violations = j.at("deadline_violations").get<int>();
    m.stranded_trucks = j.at("stranded_trucks").get<int>();
    for (const auto& row : j.at("stations")) {
        m.stations.push_back({row.at("station").get<std::string>(),
                              row.at("charging_minutes").get<double>(),
                              row.at("waiting_minutes").get<double>(),
                              row.at("charging_visits").get<int>(), row.at("mean_wait").get<double>()});
    }
    for (const auto& row : j.at("trips")) {
        TripRecord t;
        t.truck = row.at("truck").get<std::string>();
        t.arrival_time = row.at("arrival_time").get<double>();
        t.residual_battery = row.at("residual_battery").get<double>();
        t.deadline_violation = row.at("deadline_violation").get<double>();
        t.stranded = row.at("stranded").get<bool>();
        t.e_initial = row.at("e_initial").get<double>();
        t.e_safe = row.at("e_safe").get<double>();
        t.e_full = row.at("e_full").get<double>();
        t.drive_minutes = row.at("drive_minutes").get<double>();
        t.battery_at_ramps = row.at("battery_at_ramps").get<std::vector<double>>();
        for (const auto& vr : row.at("visits")) {
            StationVisit v;
            v.station = vr.at("station").get<std::string>();
            v.ramp = vr.at("ramp").get<int>();
            v.t_arrival = vr.at("t_arrival").get<double>();
            v.quoted_wait = vr.at("quoted_wait").get<double>();
            v.realized_wait = vr.at("realized_wait").get<double>();
            v.charge_time = vr.at("charge_time").get<double>();
            v.charged = vr.at("charged").get<bool>();
            v.battery_before = vr.at("battery_before").get<double>();
            v.battery_after = vr.at("battery_after").get<double>();
            v.charge_added = vr.at("charge_added").get<double>();
            t.visits.push_back(std::move(v));
        }
        m.trips.push_back(std::move(t));
    }
    return m;
}

}  // namespace fleetcharge
