#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rejopt/csv.hpp"
#include "rejopt/format.hpp"
#include "rejopt/math.hpp"

namespace rejopt {

struct LpItem {
    double p_id = 0.0;
    double p_ood = 0.0;
    double risk_mass = 0.0;  // sum_y p(x,y) * loss(y, h(x)) at this point
};

class LpError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Finite bounded TPR-FPR problem:
 *   min (1/phi_min) * sum risk_mass_x * c_x
 *   s.t. sum p_id_x * c_x = phi_min,  sum p_ood_x * c_x <= rho_max,
 *        0 <= c_x <= 1.
 * phi_min is on the ID-conditional scale: p_id (and risk_mass with it) are
 * normalized to unit total on input, p_ood likewise when its total is positive.
 */
struct LpInstance {
    std::vector<LpItem> items;
    double phi_min = 1.0;
    double rho_max = 1.0;

    void validate() const {
        if (items.empty()) throw LpError("lp: no items");
        double sid = 0.0;
        for (const auto& it : items) {
            if (!(it.p_id >= 0.0) || !(it.p_ood >= 0.0) || !(it.risk_mass >= 0.0))
                throw LpError("lp: masses must be nonnegative and finite");
            sid += it.p_id;
        }
        if (!(sid > 0.0)) throw LpError("lp: total ID mass must be positive");
        if (!(phi_min > 0.0 && phi_min <= 1.0)) throw LpError("lp: phi_min must be in (0,1]");
        if (!(rho_max >= 0.0 && rho_max <= 1.0)) throw LpError("lp: rho_max must be in [0,1]");
    }
};

enum class LpStatus { Optimal, Infeasible };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> acceptance;  // in [0,1]^X; empty when infeasible
    double objective = kNaN;         // selective-risk value
    double dual_lambda = 0.0;        // threshold recovered from the duals
    double dual_mu = 0.0;            // likelihood-ratio multiplier (>= 0)
    double id_scale = 1.0;           // divisor applied to p_id and risk_mass
    double ood_scale = 1.0;          // divisor applied to p_ood
};

namespace lpdetail {

// Bounded-variable simplex specialized to two rows. Bland's rule on both the
// entering and leaving choices keeps pivoting deterministic and cycle-free.
class TwoRowSimplex {
public:
    struct Column {
        double a0, a1;  // constraint coefficients
        double cost;
        double lb, ub;
    };

    static constexpr double kPivTol = 1e-11;
    static constexpr double kCostTol = 1e-10;

    std::vector<Column> cols;
    int basis[2] = {-1, -1};
    std::vector<bool> at_upper;
    double rhs[2] = {0.0, 0.0};

    void set_basis(int b0, int b1) {
        basis[0] = b0;
        basis[1] = b1;
        at_upper.assign(cols.size(), false);
    }

    bool solve_basis(double out[2]) const {
        const auto& c0 = cols[static_cast<std::size_t>(basis[0])];
        const auto& c1 = cols[static_cast<std::size_t>(basis[1])];
        const double det = c0.a0 * c1.a1 - c1.a0 * c0.a1;
        if (std::fabs(det) < kPivTol) return false;
        double b[2] = {rhs[0], rhs[1]};
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (static_cast<int>(j) == basis[0] || static_cast<int>(j) == basis[1]) continue;
            if (at_upper[j]) {
                b[0] -= cols[j].a0 * cols[j].ub;
                b[1] -= cols[j].a1 * cols[j].ub;
            }
        }
        out[0] = (b[0] * c1.a1 - c1.a0 * b[1]) / det;
        out[1] = (c0.a0 * b[1] - b[0] * c0.a1) / det;
        return true;
    }

    void duals(double y[2]) const {
        const auto& c0 = cols[static_cast<std::size_t>(basis[0])];
        const auto& c1 = cols[static_cast<std::size_t>(basis[1])];
        const double det = c0.a0 * c1.a1 - c1.a0 * c0.a1;
        // y solves y * [col_B0 col_B1] = c_B
        y[0] = (c0.cost * c1.a1 - c1.cost * c0.a1) / det;
        y[1] = (c1.cost * c0.a0 - c0.cost * c1.a0) / det;
    }

    /// Runs simplex to optimality; returns false on a numerical breakdown.
    bool optimize() {
        const int max_iters = 400 + 40 * static_cast<int>(cols.size());
        for (int iter = 0; iter < max_iters; ++iter) {
            double xb[2] = {0.0, 0.0};
            if (!solve_basis(xb)) return false;
            double y[2];
            duals(y);

            int enter = -1;
            bool increase = true;
            for (std::size_t j = 0; j < cols.size(); ++j) {
                if (static_cast<int>(j) == basis[0] || static_cast<int>(j) == basis[1]) continue;
                const auto& c = cols[j];
                if (c.ub - c.lb < kPivTol) continue;  // fixed column
                const double d = c.cost - y[0] * c.a0 - y[1] * c.a1;
                if (!at_upper[j] && d < -kCostTol) {
                    enter = static_cast<int>(j);
                    increase = true;
                    break;
                }
                if (at_upper[j] && d > kCostTol) {
                    enter = static_cast<int>(j);
                    increase = false;
                    break;
                }
            }
            if (enter < 0) return true;  // optimal

            const auto& ce = cols[static_cast<std::size_t>(enter)];
            const auto& c0 = cols[static_cast<std::size_t>(basis[0])];
            const auto& c1 = cols[static_cast<std::size_t>(basis[1])];
            const double det = c0.a0 * c1.a1 - c1.a0 * c0.a1;
            double w[2];  // B^-1 * A_enter
            w[0] = (ce.a0 * c1.a1 - c1.a0 * ce.a1) / det;
            w[1] = (c0.a0 * ce.a1 - ce.a0 * c0.a1) / det;

            // basic value moves by -sgn * w * t as the entering value moves t
            const double sgn = increase ? 1.0 : -1.0;
            double t_best = ce.ub - ce.lb;  // bound flip
            int leave = -1;                 // -1 means bound flip
            bool leave_to_upper = false;
            for (int i = 0; i < 2; ++i) {
                const auto& cb = cols[static_cast<std::size_t>(basis[i])];
                const double wi = sgn * w[i];
                if (wi > kPivTol) {  // decreasing toward its lower bound
                    const double t = (xb[i] - cb.lb) / wi;
                    if (t < t_best - 1e-15 || (t < t_best + 1e-15 && leave >= 0 &&
                                               basis[i] < basis[leave])) {
                        t_best = std::max(t, 0.0);
                        leave = i;
                        leave_to_upper = false;
                    }
                } else if (wi < -kPivTol && std::isfinite(cb.ub)) {
                    const double t = (cb.ub - xb[i]) / (-wi);
                    if (t < t_best - 1e-15 || (t < t_best + 1e-15 && leave >= 0 &&
                                               basis[i] < basis[leave])) {
                        t_best = std::max(t, 0.0);
                        leave = i;
                        leave_to_upper = true;
                    }
                }
            }
            if (!std::isfinite(t_best)) return false;  // unbounded; cannot happen here

            if (leave < 0) {
                at_upper[static_cast<std::size_t>(enter)] = increase;
            } else {
                at_upper[static_cast<std::size_t>(basis[leave])] = leave_to_upper;
                // entering becomes basic; record which bound it came from
                at_upper[static_cast<std::size_t>(enter)] = false;
                basis[leave] = enter;
            }
        }
        return false;
    }

    double value(int j, const double xb[2]) const {
        if (j == basis[0]) return xb[0];
        if (j == basis[1]) return xb[1];
        return at_upper[static_cast<std::size_t>(j)] ? cols[static_cast<std::size_t>(j)].ub
                                                     : cols[static_cast<std::size_t>(j)].lb;
    }
};

}  // namespace lpdetail

inline LpSolution solve(const LpInstance& raw) {
    raw.validate();
    const std::size_t n = raw.items.size();

    LpSolution sol;
    double sid = 0.0, sood = 0.0;
    for (const auto& it : raw.items) {
        sid += it.p_id;
        sood += it.p_ood;
    }
    sol.id_scale = sid;
    sol.ood_scale = sood > 0.0 ? sood : 1.0;

    lpdetail::TwoRowSimplex sx;
    sx.cols.reserve(n + 2);
    for (const auto& it : raw.items)
        sx.cols.push_back({it.p_id / sol.id_scale, it.p_ood / sol.ood_scale,
                           it.risk_mass / sol.id_scale / raw.phi_min, 0.0, 1.0});
    const int slack = static_cast<int>(n);
    sx.cols.push_back({0.0, 1.0, 0.0, 0.0, kInf});  // slack for the FPR cap
    const int artificial = static_cast<int>(n) + 1;
    sx.cols.push_back({1.0, 0.0, 0.0, 0.0, kInf});  // phase-1 artificial (coverage row)
    sx.rhs[0] = raw.phi_min;
    sx.rhs[1] = raw.rho_max;

    // phase 1: minimize the artificial
    for (auto& c : sx.cols) c.cost = 0.0;
    sx.cols[static_cast<std::size_t>(artificial)].cost = 1.0;
    sx.set_basis(artificial, slack);
    if (!sx.optimize()) throw LpError("lp: simplex breakdown in phase 1");
    {
        double xb[2] = {0.0, 0.0};
        sx.solve_basis(xb);
        double infeas = 0.0;
        if (sx.basis[0] == artificial) infeas = xb[0];
        if (sx.basis[1] == artificial) infeas = xb[1];
        if (infeas > 1e-9) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
    }

    // phase 2: the real objective; the artificial is frozen at zero
    for (std::size_t j = 0; j < n; ++j)
        sx.cols[j].cost = raw.items[j].risk_mass / sol.id_scale / raw.phi_min;
    sx.cols[static_cast<std::size_t>(slack)].cost = 0.0;
    sx.cols[static_cast<std::size_t>(artificial)].cost = 0.0;
    sx.cols[static_cast<std::size_t>(artificial)].ub = 0.0;
    if (!sx.optimize()) throw LpError("lp: simplex breakdown in phase 2");

    double xb[2] = {0.0, 0.0};
    sx.solve_basis(xb);
    sol.status = LpStatus::Optimal;
    sol.acceptance.resize(n);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double v = sx.value(static_cast<int>(j), xb);
        v = std::clamp(v, 0.0, 1.0);
        sol.acceptance[j] = v;
        sol.objective += sx.cols[j].cost * v;
    }
    double y[2];
    sx.duals(y);
    sol.dual_lambda = y[0] * raw.phi_min;
    sol.dual_mu = -y[1] * raw.phi_min;
    return sol;
}

struct StructureReport {
    bool consistent = true;
    std::vector<std::size_t> offending;
    double lambda = 0.0;
    double mu = 0.0;
    int fractional_count = 0;
    int fractional_ratio_values = 0;  // distinct likelihood ratios among fractional items
};

/**
 * Checks the optimal-acceptance structure implied by the duals: items whose
 * score risk/p_id + mu * p_ood/p_id is strictly below the recovered threshold
 * must be fully accepted, items strictly above fully rejected, and fractional
 * items must sit on the boundary (at most two of them, a basic solution of a
 * two-constraint program).
 */
inline StructureReport verify_band_structure(const LpInstance& raw, const LpSolution& sol) {
    if (sol.status != LpStatus::Optimal)
        throw LpError("verify_band_structure: solution is not optimal");
    constexpr double tol = 1e-7;
    StructureReport rep;
    rep.lambda = sol.dual_lambda;
    rep.mu = sol.dual_mu;

    std::vector<double> frac_ratios;
    for (std::size_t j = 0; j < raw.items.size(); ++j) {
        const double c = sol.acceptance[j];
        const double pid = raw.items[j].p_id / sol.id_scale;
        const double pood = raw.items[j].p_ood / sol.ood_scale;
        const double risk = raw.items[j].risk_mass / sol.id_scale;
        const bool fractional = c > tol && c < 1.0 - tol;
        if (fractional) {
            ++rep.fractional_count;
            frac_ratios.push_back(pid > 0.0 ? pood / pid : kInf);
        }
        if (pid > 0.0) {
            const double score = risk / pid + rep.mu * (pood / pid);
            const bool bad = (score < rep.lambda - tol && c < 1.0 - tol) ||
                             (score > rep.lambda + tol && c > tol) ||
                             (fractional && std::fabs(score - rep.lambda) > tol);
            if (bad) rep.offending.push_back(j);
        } else if ((rep.mu > 1e-12 && pood > 0.0) || risk > 0.0) {
            // infinite score: must be rejected
            if (c > tol) rep.offending.push_back(j);
        }
    }
    std::sort(frac_ratios.begin(), frac_ratios.end());
    for (std::size_t i = 0; i < frac_ratios.size(); ++i)
        if (i == 0 || frac_ratios[i] > frac_ratios[i - 1] * (1.0 + 1e-9) + 1e-12)
            ++rep.fractional_ratio_values;

    if (rep.fractional_count > 2 || rep.fractional_ratio_values > 2 || !rep.offending.empty())
        rep.consistent = false;
    return rep;
}

// --- CSV interfaces ---------------------------------------------------------

inline LpInstance read_lp_csv(std::istream& in, const std::string& name, double phi_min,
                              double rho_max) {
    LpInstance inst;
    inst.phi_min = phi_min;
    inst.rho_max = rho_max;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw LpError(name + ": empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "p_id,p_ood,risk_mass")
        throw LpError(name + ":1: bad header (expected p_id,p_ood,risk_mass)");
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        const std::string where = name + ":" + std::to_string(lineno);
        if (f.size() != 3) throw LpError(where + ": expected 3 columns");
        LpItem it;
        it.p_id = detail::parse_double(f[0], where);
        it.p_ood = detail::parse_double(f[1], where);
        it.risk_mass = detail::parse_double(f[2], where);
        inst.items.push_back(it);
    }
    inst.validate();
    return inst;
}

inline void write_lp_solution_csv(std::ostream& out, const LpSolution& sol) {
    out << "index,acceptance\n";
    for (std::size_t i = 0; i < sol.acceptance.size(); ++i)
        out << i << ',' << format_double(sol.acceptance[i]) << '\n';
}

}  // namespace rejopt
