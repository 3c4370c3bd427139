#include "brute_force_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fleetcharge::oracle {

namespace {

double rate_of(const PlannerInput& in, std::size_t j) {
    const double kw = in.stations[j].port_power < in.truck.p_max ? in.stations[j].port_power : in.truck.p_max;
    return kw / 60.0;
}

double price_per_minute(const PlannerInput& in, std::size_t j) {
    return in.stations[j].electricity_price_energy * rate_of(in, j);
}

double wait_of(const PlannerInput& in, std::size_t j) {
    return j == 0 ? in.quoted_wait : in.assumed_waits[j - 1];
}

double travel_total(const PlannerInput& in) {
    double s = in.lead_time;
    for (double tau : in.segment_times) s += tau;
    return s;
}

struct Search {
    const PlannerInput& in;
    double g;
    double slack;
    std::vector<bool> charge;
    std::vector<double> t;
    std::size_t last_selected = 0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> best_charge;
    std::vector<double> best_t;

    double unit_cost(std::size_t j) const { return in.truck.kappa + price_per_minute(in, j); }

    double cap_steps(std::size_t j) const { return std::ceil(in.truck.e_full / rate_of(in, j) / g - 1e-9); }

    bool margin_ok(std::size_t j, double e) const {
        if (!charge[j] && !in.reach_margin_at_every_ramp) return true;
        return e >= in.truck.e_safe + in.truck.p_bar * in.detour_times[j] - slack;
    }

    // Energy needed on top of `e` (battery at ramp j + 1 with no further
    // charging) to satisfy every later ramp margin and the destination.
    double downstream_deficit(std::size_t j, double e_next) const {
        const auto& p = in.truck;
        double deficit = 0.0;
        double e = e_next;
        for (std::size_t l = j + 1; l < in.stations.size(); ++l) {
            if (charge[l] || in.reach_margin_at_every_ramp) {
                deficit = std::max(deficit, p.e_safe + p.p_bar * in.detour_times[l] - e);
            }
            e -= p.p_bar * ((charge[l] ? 2.0 * in.detour_times[l] : 0.0) + in.segment_times[l]);
        }
        return std::max(deficit, p.e_safe - e);
    }

    void finish(double e, double partial) {
        if (e < in.truck.e_safe - slack) return;
        double busy = travel_total(in);
        for (std::size_t j = 0; j < charge.size(); ++j) {
            if (charge[j]) busy += 2.0 * in.detour_times[j] + wait_of(in, j) + t[j];
        }
        const double over = busy - in.remaining_time;
        const double total = partial + (in.truck.rho * over > 0.0 ? in.truck.rho * over : 0.0);
        if (total < best) {
            best = total;
            best_charge = charge;
            best_t = t;
        }
    }

    void visit(std::size_t j, double e, double partial) {
        if (partial >= best) return;
        if (j == in.stations.size()) {
            finish(e, partial);
            return;
        }
        if (!margin_ok(j, e)) return;
        const auto& p = in.truck;
        const double tau = in.segment_times[j];
        if (!charge[j]) {
            t[j] = 0.0;
            visit(j + 1, e - p.p_bar * tau, partial);
            return;
        }
        const double d = in.detour_times[j];
        const double room = p.e_full - (e - p.p_bar * d);
        const double r = rate_of(in, j);
        const double e_base = e - p.p_bar * (2.0 * d + tau);
        const long cap = static_cast<long>(cap_steps(j));
        long k = 0;
        if (j == last_selected) {
            const double need = downstream_deficit(j, e_base);
            k = need > 0.0 ? static_cast<long>(std::floor(need / r / g)) : 0;
        }
        for (; k <= cap; ++k) {
            const double tj = static_cast<double>(k) * g;
            if (r * tj > room + slack) break;
            const double cost = partial + unit_cost(j) * tj;
            if (cost >= best) break;
            t[j] = tj;
            if (j == last_selected) {
                if (downstream_deficit(j, e_base + r * tj) > slack) continue;
                visit(j + 1, e_base + r * tj, cost);
                break;  // later grid values only cost more
            }
            visit(j + 1, e_base + r * tj, cost);
        }
        t[j] = 0.0;
    }
};

}  // namespace

double oracle_cost(const PlannerInput& in, const ChargingPlan& plan) {
    double busy = travel_total(in);
    double cost = 0.0;
    for (std::size_t j = 0; j < plan.decisions.size(); ++j) {
        const auto& dec = plan.decisions[j];
        if (!dec.charge) continue;
        const double minutes = 2.0 * in.detour_times[j] + wait_of(in, j) + dec.duration;
        busy += minutes;
        cost += in.truck.kappa * minutes + price_per_minute(in, j) * dec.duration;
    }
    const double over = busy - in.remaining_time;
    return cost + (in.truck.rho * over > 0.0 ? in.truck.rho * over : 0.0);
}

bool oracle_feasible(const PlannerInput& in, const ChargingPlan& plan, double slack) {
    const auto& p = in.truck;
    double e = in.battery - p.p_bar * in.lead_time;
    for (std::size_t j = 0; j < plan.decisions.size(); ++j) {
        const auto& dec = plan.decisions[j];
        const double d = in.detour_times[j];
        if (dec.duration < 0.0 || (!dec.charge && dec.duration != 0.0)) return false;
        if ((dec.charge || in.reach_margin_at_every_ramp) && e < p.e_safe + p.p_bar * d - slack) return false;
        if (dec.charge) {
            const double added = rate_of(in, j) * dec.duration;
            if (added > p.e_full - (e - p.p_bar * d) + slack) return false;
            e += added - 2.0 * p.p_bar * d;
        }
        e -= p.p_bar * in.segment_times[j];
    }
    return e >= p.e_safe - slack;
}

PlannerSolution brute_force_oracle(const PlannerInput& in, double grid_step) {
    const std::size_t m = in.stations.size();
    if (m > kMaxOracleStations) throw std::invalid_argument("oracle supports at most 3 stations");
    if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");

    Search s{in, grid_step, 1e-6, std::vector<bool>(m), std::vector<double>(m, 0.0)};
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        double fixed = 0.0;
        bool any = false;
        for (std::size_t j = 0; j < m; ++j) {
            s.charge[j] = ((mask >> j) & 1U) != 0;
            if (s.charge[j]) {
                fixed += in.truck.kappa * (2.0 * in.detour_times[j] + wait_of(in, j));
                s.last_selected = j;
                any = true;
            }
        }
        if (!any) s.last_selected = m;
        s.visit(0, in.battery - in.truck.p_bar * in.lead_time, fixed);
    }

    PlannerSolution out;
    out.plan.decisions.assign(m, ChargeDecision{});
    if (!std::isfinite(s.best)) {
        out.status = PlannerStatus::infeasible;
        out.objective = std::numeric_limits<double>::infinity();
        return out;
    }
    out.status = PlannerStatus::optimal;
    out.objective = s.best;
    for (std::size_t j = 0; j < m; ++j) out.plan.decisions[j] = {static_cast<bool>(s.best_charge[j]), s.best_t[j]};
    out.plan.anticipated_cost = s.best;
    return out;
}

}  // namespace fleetcharge::oracle
