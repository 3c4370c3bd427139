#include "fleetcharge/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fleetcharge {

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

nlohmann::json read_json(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt " + p.string() + ": " + e.what());
    }
}

}  // namespace

std::string format_report_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

void write_trips_csv(std::ostream& out, const RunMetrics& m) {
    out << "truck,station,ramp,t_arrival,quoted_wait,realized_wait,charge_time,battery_before,battery_after\n";
    for (const auto& t : m.trips) {
        for (const auto& v : t.visits) {
            out << t.truck << ',' << v.station << ',' << v.ramp << ',' << format_report_number(v.t_arrival)
                << ',' << format_report_number(v.quoted_wait) << ','
                << format_report_number(v.realized_wait) << ',' << format_report_number(v.charge_time)
                << ',' << format_report_number(v.battery_before) << ','
                << format_report_number(v.battery_after) << '\n';
        }
    }
}

void write_stations_csv(std::ostream& out, const RunMetrics& m) {
    out << "station,charging_minutes,waiting_minutes,charging_visits,mean_wait\n";
    for (const auto& s : m.stations) {
        out << s.station << ',' << format_report_number(s.charging_minutes) << ','
            << format_report_number(s.waiting_minutes) << ',' << s.charging_visits << ','
            << format_report_number(s.mean_wait) << '\n';
    }
}

void write_compare_csv(std::ostream& out, const ComparisonReport& r) {
    out << "scope,id,baseline_wait,proposed_wait,delta_wait,baseline_charge,proposed_charge,reduction_pct\n";
    auto row = [&out](const char* scope, const std::string& id, double wa, double wb, double ca,
                      double cb) {
        out << scope << ',' << id << ',' << format_report_number(wa) << ','
            << format_report_number(wb) << ',' << format_report_number(wb - wa) << ','
            << format_report_number(ca) << ',' << format_report_number(cb) << ','
            << format_report_number(reduction_percent(wa, wb)) << '\n';
    };
    double charge_a = 0.0;
    double charge_b = 0.0;
    for (const auto& t : r.trucks) {
        row("truck", t.truck, t.wait_a, t.wait_b, t.charge_a, t.charge_b);
        charge_a += t.charge_a;
        charge_b += t.charge_b;
    }
    for (const auto& s : r.stations) {
        row("station", s.station, s.a.waiting_minutes, s.b.waiting_minutes, s.a.charging_minutes,
            s.b.charging_minutes);
    }
    row("total", "all", r.total_wait_hours_a * 60.0, r.total_wait_hours_b * 60.0, charge_a, charge_b);
}

void write_waits_sorted_csv(std::ostream& out, const RunMetrics& m) {
    std::vector<std::pair<Minutes, TruckId>> rows;
    for (const auto& t : m.trips) {
        const Minutes w = t.total_wait();
        if (w > 0.0) rows.emplace_back(w, t.truck);
    }
    std::sort(rows.begin(), rows.end());
    out << "truck,wait_minutes\n";
    for (const auto& [w, id] : rows) out << id << ',' << format_report_number(w) << '\n';
}

void write_residual_battery_csv(std::ostream& out, const RunMetrics& m) {
    out << "truck,residual_battery,threshold,residual_percent,stranded\n";
    for (const auto& t : m.trips) {
        out << t.truck << ',' << format_report_number(t.residual_battery) << ','
            << format_report_number(t.e_safe) << ','
            << format_report_number(t.e_full > 0.0 ? t.residual_battery / t.e_full * 100.0 : 0.0)
            << ',' << (t.stranded ? 1 : 0) << '\n';
    }
}

void write_port_timeline_csv(std::ostream& out, const std::vector<PortLedger>& ledgers) {
    out << "station,port,truck,start,end\n";
    for (const auto& l : ledgers) {
        for (const auto& row : l.realized_schedule()) {
            out << l.station_id() << ',' << row.port << ',' << row.truck << ','
                << format_report_number(row.start) << ',' << format_report_number(row.end) << '\n';
        }
    }
}

nlohmann::ordered_json ledgers_to_json(const std::vector<PortLedger>& ledgers) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& l : ledgers) j.push_back(l.to_json());
    return j;
}

std::vector<PortLedger> ledgers_from_json(const nlohmann::json& j) {
    std::vector<PortLedger> out;
    for (const auto& item : j) out.push_back(ledger_from_json(item));
    return out;
}

void write_run_outputs(const std::filesystem::path& dir, const RunResult& run) {
    std::filesystem::create_directories(dir);
    open_out(dir / "metrics.json") << to_json(run.metrics).dump(2) << '\n';
    {
        auto out = open_out(dir / "trips.csv");
        write_trips_csv(out, run.metrics);
    }
    {
        auto out = open_out(dir / "stations.csv");
        write_stations_csv(out, run.metrics);
    }
    {
        auto out = open_out(dir / "transcript.jsonl");
        run.exchanges.write_jsonl(out);
    }
    open_out(dir / "ledgers.json") << ledgers_to_json(run.ledgers).dump(2) << '\n';
}

RunMetrics load_metrics(const std::filesystem::path& metrics_json) {
    const auto j = read_json(metrics_json);
    try {
        return metrics_from_json(j);
    } catch (const std::exception& e) {
        throw std::runtime_error("corrupt " + metrics_json.string() + ": " + e.what());
    }
}

void write_report(const std::filesystem::path& run_dir) {
    const RunMetrics m = load_metrics(run_dir / "metrics.json");
    std::vector<PortLedger> ledgers;
    try {
        ledgers = ledgers_from_json(read_json(run_dir / "ledgers.json"));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt " + (run_dir / "ledgers.json").string() + ": " + e.what());
    }
    const auto dir = run_dir / "report";
    std::filesystem::create_directories(dir);
    {
        auto out = open_out(dir / "waits_sorted.csv");
        write_waits_sorted_csv(out, m);
    }
    {
        auto out = open_out(dir / "station_totals.csv");
        write_stations_csv(out, m);
    }
    {
        auto out = open_out(dir / "residual_battery.csv");
        write_residual_battery_csv(out, m);
    }
    {
        auto out = open_out(dir / "port_timeline.csv");
        write_port_timeline_csv(out, ledgers);
    }
}

}  // namespace fleetcharge
