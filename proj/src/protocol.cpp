#include "fleetcharge/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace fleetcharge {

namespace {

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

template <typename... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <typename... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string string_field(const nlohmann::json& j, const char* field) {
    if (!j.contains(field)) throw DecodeError(field, "missing");
    if (!j.at(field).is_string()) throw DecodeError(field, "expected a string");
    return j.at(field).get<std::string>();
}

double time_field(const nlohmann::json& j, const char* field) {
    if (!j.contains(field)) throw DecodeError(field, "missing");
    if (!j.at(field).is_number()) throw DecodeError(field, "expected a number");
    const double v = j.at(field).get<double>();
    if (!(v >= 0.0) || !std::isfinite(v)) throw DecodeError(field, "must be a nonnegative time");
    return v;
}

}  // namespace

std::string format_wire_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

std::string encode_message(const Message& m) {
    return std::visit(
        overloaded{
            [](const ArrivalAnnouncement& a) {
                return R"({"type":"arrival","truck":)" + quote(a.truck) + R"(,"station":)"
                       + quote(a.station) + R"(,"t_arrival":)" + format_wire_number(a.arrival) + "}";
            },
            [](const WaitingEstimate& e) {
                return R"({"type":"estimate","station":)" + quote(e.station) + R"(,"truck":)"
                       + quote(e.truck) + R"(,"wait":)" + format_wire_number(e.wait) + "}";
            },
            [](const ChargingCommitment& c) {
                return R"({"type":"commit","truck":)" + quote(c.truck) + R"(,"station":)"
                       + quote(c.station) + R"(,"charge_time":)" + format_wire_number(c.charge_time)
                       + "}";
            },
            [](const Ack& a) {
                return R"({"type":"ack","station":)" + quote(a.station) + R"(,"truck":)"
                       + quote(a.truck) + "}";
            },
        },
        m);
}

Message decode_message(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
        throw DecodeError("message", "not valid JSON");
    }
    if (!j.is_object()) throw DecodeError("message", "expected an object");
    const std::string type = string_field(j, "type");
    if (type == "arrival") {
        return ArrivalAnnouncement{string_field(j, "truck"), string_field(j, "station"),
                                   time_field(j, "t_arrival")};
    }
    if (type == "estimate") {
        return WaitingEstimate{string_field(j, "station"), string_field(j, "truck"),
                               time_field(j, "wait")};
    }
    if (type == "commit") {
        return ChargingCommitment{string_field(j, "truck"), string_field(j, "station"),
                                  time_field(j, "charge_time")};
    }
    if (type == "ack") return Ack{string_field(j, "station"), string_field(j, "truck")};
    throw DecodeError("type", "unknown message type '" + type + "'");
}

std::vector<std::string> check_transcript(const ExchangeTranscript& t) {
    std::vector<std::string> out;
    const TruckId& truck = t.arrival.truck;
    const StationId& station = t.arrival.station;
    if (t.estimate.truck != truck || t.commitment.truck != truck || t.ack.truck != truck) {
        out.push_back("exchange " + std::to_string(t.sequence_no) + " involves more than one truck");
    }
    if (t.estimate.station != station || t.commitment.station != station || t.ack.station != station) {
        out.push_back("exchange " + std::to_string(t.sequence_no) + " involves more than one station");
    }
    const std::uint64_t step = t.commitment.charge_time > 0.0 ? 1 : 0;
    if (t.ledger_version_after != t.ledger_version_before + step) {
        out.push_back("exchange " + std::to_string(t.sequence_no) + " ledger version jumped");
    }
    const auto msgs = t.messages();
    for (std::size_t i = 0; i < msgs.size(); ++i) {
        if (msgs[i].index() != i) {
            out.push_back("exchange " + std::to_string(t.sequence_no) + " messages out of order");
            break;
        }
    }
    return out;
}

PlannerInput planner_input_at_ramp(const TruckSpec& truck, const TruckState& state,
                                   std::span<const StationSpec> route_stations, Minutes quoted_wait) {
    const Route& r = truck.route;
    const auto first = static_cast<std::size_t>(state.next_ramp - 1);  // offset of S_k
    const auto n = static_cast<std::size_t>(r.ramp_count);

    PlannerInput in;
    in.truck = truck.params;
    in.battery = state.battery;
    in.quoted_wait = quoted_wait;
    in.remaining_time = state.remaining_budget();
    for (std::size_t l = first; l < n; ++l) {
        in.segment_times.push_back(r.segment_times[l + 1]);
        in.detour_times.push_back(r.detour_times[l]);
        in.stations.push_back(route_stations[l]);
        if (l > first) in.assumed_waits.push_back(truck.w_hat_default);
    }
    return in;
}

void ExchangeLog::write_jsonl(std::ostream& out) const {
    for (const auto& t : transcripts_) {
        for (const auto& m : t.messages()) out << encode_message(m) << '\n';
    }
}

ExchangeResult run_ramp_exchange(const TruckSpec& truck, const TruckState& state,
                                 std::span<const StationSpec> route_stations, PortLedger& ledger,
                                 const Planner& planner, ExchangeLog& log) {
    const auto offset = static_cast<std::size_t>(state.next_ramp - 1);
    const StationId& station = truck.route.station_ids.at(offset);
    if (station != ledger.station_id()) {
        throw std::logic_error("truck " + truck.id + " at ramp " + std::to_string(state.next_ramp)
                               + " addressed the wrong station ledger");
    }

    ExchangeResult res;
    ExchangeTranscript& t = res.transcript;
    t.sequence_no = log.next_sequence();
    t.ledger_version_before = ledger.version();

    // 1. The anticipated arrival is the present time plus the detour.
    t.arrival = {truck.id, station, state.clock + truck.route.detour_times[offset]};
    // 2.
    res.quote = ledger.estimate_wait(t.arrival.arrival);
    t.estimate = {station, truck.id, res.quote.wait};
    // 3.
    const PlannerInput input = planner_input_at_ramp(truck, state, route_stations, res.quote.wait);
    res.solution = planner(input);
    t.planner_status = res.solution.status;
    Minutes charge = 0.0;
    if (res.solution.status == PlannerStatus::optimal) {
        charge = res.solution.current_charge_time();
    } else if (auto rescue = minimal_charge_here(input)) {
        charge = *rescue;
        t.outcome = ExchangeOutcome::rescued;
    } else {
        t.outcome = ExchangeOutcome::stranded;
    }
    t.commitment = {truck.id, station, charge};
    // 4.
    ledger.commit(res.quote, truck.id, charge);
    t.ack = {station, truck.id};
    t.ledger_version_after = ledger.version();

    log.append(t);
    return res;
}

}  // namespace fleetcharge
