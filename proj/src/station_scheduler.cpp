#include "fleetcharge/station_scheduler.hpp"

#include <algorithm>

namespace fleetcharge {

PortLedger::PortLedger(StationId station_id, int port_count)
    : station_id_(std::move(station_id)),
      available_(static_cast<std::size_t>(std::max(port_count, 1)), 0.0) {}

PortLedger PortLedger::replay(StationId station_id, int port_count,
                              const std::vector<Assignment>& log) {
    PortLedger ledger(std::move(station_id), port_count);
    for (const auto& a : log) {
        ledger.log_.push_back(a);
        auto& slot = ledger.available_.at(static_cast<std::size_t>(a.port));
        slot = std::max(slot, a.end());
        ++ledger.version_;
    }
    return ledger;
}

PortLedger PortLedger::from_parts(StationId station_id, std::vector<Minutes> available_times,
                                  std::vector<Assignment> assignments) {
    PortLedger ledger(std::move(station_id), 1);
    ledger.available_ = std::move(available_times);
    ledger.version_ = assignments.size();
    ledger.log_ = std::move(assignments);
    return ledger;
}

WaitQuote PortLedger::estimate_wait(Minutes arrival) const {
    // First minimum wins, so ties go to the lowest port index.
    const auto it = std::min_element(available_.begin(), available_.end());
    WaitQuote q;
    q.port = static_cast<int>(it - available_.begin());
    q.wait = std::max(*it - arrival, 0.0);
    q.arrival = arrival;
    q.ledger_version = version_;
    return q;
}

void PortLedger::commit(const WaitQuote& quote, const TruckId& truck, Minutes charge_time) {
    if (quote.ledger_version != version_) {
        throw StaleQuoteError("station " + station_id_ + ": quote issued at ledger version "
                              + std::to_string(quote.ledger_version) + " committed at version "
                              + std::to_string(version_));
    }
    if (!(charge_time >= 0.0)) {
        throw std::invalid_argument("station " + station_id_ + ": negative charging time");
    }
    if (charge_time == 0.0) return;

    // Equals arrival + wait, but taken from the port so rounding cannot
    // start a booking before the previous one ends.
    const Minutes start = std::max(quote.arrival, available_[static_cast<std::size_t>(quote.port)]);
    log_.push_back({truck, quote.port, start, charge_time});
    available_[static_cast<std::size_t>(quote.port)] = start + charge_time;
    ++version_;
}

std::vector<ScheduleRow> PortLedger::realized_schedule() const {
    std::vector<ScheduleRow> rows;
    rows.reserve(log_.size());
    for (const auto& a : log_) rows.push_back({a.port, a.truck, a.start, a.end()});
    std::stable_sort(rows.begin(), rows.end(), [](const ScheduleRow& x, const ScheduleRow& y) {
        if (x.port != y.port) return x.port < y.port;
        return x.start < y.start;
    });
    return rows;
}

std::vector<Violation> PortLedger::audit() const {
    std::vector<Violation> out;
    const std::string entity = "station " + station_id_;
    const auto ports = available_.size();

    std::vector<std::vector<const Assignment*>> per_port(ports);
    for (const auto& a : log_) {
        if (a.port < 0 || static_cast<std::size_t>(a.port) >= ports) {
            out.push_back({entity, "assignment for " + a.truck + " references unknown port "
                                       + std::to_string(a.port)});
            continue;
        }
        if (!(a.duration >= 0.0)) {
            out.push_back({entity, "assignment for " + a.truck + " has negative duration"});
        }
        per_port[static_cast<std::size_t>(a.port)].push_back(&a);
    }

    for (std::size_t c = 0; c < ports; ++c) {
        const auto& rows = per_port[c];
        Minutes latest_end = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0) {
                const Assignment& prev = *rows[i - 1];
                const Assignment& cur = *rows[i];
                if (cur.start < prev.start) {
                    out.push_back({entity, "port " + std::to_string(c)
                                               + ": assignments out of start order at "
                                               + cur.truck});
                } else if (cur.start < prev.end()) {
                    out.push_back({entity, "port " + std::to_string(c) + ": " + prev.truck
                                               + " overlaps " + cur.truck});
                }
            }
            latest_end = std::max(latest_end, rows[i]->end());
        }
        if (available_[c] != latest_end) {
            out.push_back({entity, "port " + std::to_string(c)
                                       + ": available time disagrees with assignment log"});
        }
    }
    return out;
}

nlohmann::ordered_json PortLedger::to_json() const {
    nlohmann::ordered_json j;
    j["station_id"] = station_id_;
    j["available_times"] = available_;
    j["assignments"] = nlohmann::ordered_json::array();
    for (const auto& a : log_) {
        nlohmann::ordered_json row;
        row["truck"] = a.truck;
        row["port"] = a.port;
        row["start"] = a.start;
        row["duration"] = a.duration;
        j["assignments"].push_back(std::move(row));
    }
    return j;
}

PortLedger ledger_from_json(const nlohmann::json& j) {
    std::vector<Assignment> log;
    for (const auto& row : j.at("assignments")) {
        log.push_back({row.at("truck").get<std::string>(), row.at("port").get<int>(),
                       row.at("start").get<double>(), row.at("duration").get<double>()});
    }
    return PortLedger::from_parts(j.at("station_id").get<std::string>(),
                                  j.at("available_times").get<std::vector<double>>(),
                                  std::move(log));
}

}  // namespace fleetcharge
