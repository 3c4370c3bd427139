#include "fleetcharge/lp_solver.hpp"

#include <cstddef>
#include <limits>

namespace fleetcharge::lp {

namespace {

constexpr double kEps = 1e-9;

// Tableau layout follows the usual "maximize c.x, Ax <= b" dictionary form:
// rows 0..m-1 are constraints, row m the objective, row m+1 the phase-one
// objective. Column n holds the auxiliary variable, column n+1 the rhs.
class Tableau {
public:
    Tableau(const Problem& p)
        : m_(p.rows.size()),
          n_(p.cost.size()),
          d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)),
          basic_(m_),
          nonbasic_(n_ + 1) {
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) d_[i][j] = p.rows[i][j];
            d_[i][n_] = -1.0;
            d_[i][n_ + 1] = p.rhs[i];
            basic_[i] = static_cast<long>(n_ + i);
        }
        for (std::size_t j = 0; j < n_; ++j) {
            nonbasic_[j] = static_cast<long>(j);
            d_[m_][j] = p.cost[j];  // row holds -c for "maximize c.x" with c = -cost
        }
        nonbasic_[n_] = -1;
        d_[m_ + 1][n_] = 1.0;
    }

    Result run() {
        Result res;
        std::size_t r = 0;
        for (std::size_t i = 1; i < m_; ++i) {
            if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
        }
        if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
            pivot(r, n_);
            if (!simplex(1) || d_[m_ + 1][n_ + 1] < -kEps) {
                res.status = Status::infeasible;
                return res;
            }
            // Drive the auxiliary variable out of the basis if it lingers at zero.
            for (std::size_t i = 0; i < m_; ++i) {
                if (basic_[i] != -1) continue;
                std::size_t s = 0;
                for (std::size_t j = 1; j <= n_; ++j) {
                    if (d_[i][j] < d_[i][s] || (d_[i][j] == d_[i][s] && nonbasic_[j] < nonbasic_[s])) {
                        s = j;
                    }
                }
                pivot(i, s);
            }
        }
        if (!simplex(2)) {
            res.status = Status::unbounded;
            return res;
        }
        res.status = Status::optimal;
        res.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basic_[i] >= 0 && static_cast<std::size_t>(basic_[i]) < n_) {
                res.x[static_cast<std::size_t>(basic_[i])] = d_[i][n_ + 1];
            }
        }
        res.objective = -d_[m_][n_ + 1];
        return res;
    }

private:
    void pivot(std::size_t r, std::size_t s) {
        const double inv = 1.0 / d_[r][s];
        for (std::size_t i = 0; i < m_ + 2; ++i) {
            if (i == r || d_[i][s] == 0.0) continue;
            const double f = d_[i][s] * inv;
            for (std::size_t j = 0; j < n_ + 2; ++j) {
                if (j != s) d_[i][j] -= d_[r][j] * f;
            }
            d_[i][s] = -f;
        }
        for (std::size_t j = 0; j < n_ + 2; ++j) {
            if (j != s) d_[r][j] *= inv;
        }
        d_[r][s] = inv;
        std::swap(basic_[r], nonbasic_[s]);
    }

    // Bland's rule: lowest-index improving column, lowest-index leaving row
    // among ratio ties. Guarantees termination on degenerate programs.
    bool simplex(int phase) {
        const std::size_t obj = phase == 1 ? m_ + 1 : m_;
        for (;;) {
            long s = -1;
            for (std::size_t j = 0; j <= n_; ++j) {
                if (phase == 2 && nonbasic_[j] == -1) continue;
                if (d_[obj][j] < -kEps && (s < 0 || nonbasic_[j] < nonbasic_[static_cast<std::size_t>(s)])) {
                    s = static_cast<long>(j);
                }
            }
            if (s < 0) return true;
            const auto sc = static_cast<std::size_t>(s);

            long r = -1;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (d_[i][sc] <= kEps) continue;
                const double ratio = d_[i][n_ + 1] / d_[i][sc];
                if (r < 0 || ratio < best - kEps) {
                    best = ratio;
                    r = static_cast<long>(i);
                } else if (ratio <= best + kEps && basic_[i] < basic_[static_cast<std::size_t>(r)]) {
                    r = static_cast<long>(i);
                }
            }
            if (r < 0) return false;
            pivot(static_cast<std::size_t>(r), sc);
        }
    }

    std::size_t m_;
    std::size_t n_;
    std::vector<std::vector<double>> d_;
    std::vector<long> basic_;
    std::vector<long> nonbasic_;
};

}  // namespace

Result solve(const Problem& problem) {
    Tableau t(problem);
    return t.run();
}

}  // namespace fleetcharge::lp
