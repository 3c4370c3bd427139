#pragma once

#include <vector>

namespace fleetcharge::lp {

enum class Status { optimal, infeasible, unbounded };

/// minimize  cost . x   subject to  rows * x <= rhs,  x >= 0.
struct Problem {
    std::vector<double> cost;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;

    void add_le(std::vector<double> row, double bound) {
        rows.push_back(std::move(row));
        rhs.push_back(bound);
    }
    void add_ge(std::vector<double> row, double bound) {
        for (auto& v : row) v = -v;
        add_le(std::move(row), -bound);
    }
};

struct Result {
    Status status = Status::infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

/// Two-phase tableau simplex with Bland's rule. Intended for the small,
/// dense programs produced by the charge planner (tens of rows).
Result solve(const Problem& problem);

}  // namespace fleetcharge::lp
