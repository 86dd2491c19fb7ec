#pragma once

// Shared test utilities: deterministic random datasets whose loss values are
// dyadic (so sums are exact in either accumulation order), the brute-force
// threshold-enumeration oracle for sweeps, and the basic-feasible-solution
// enumeration oracle for the two-constraint LP.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rejopt/dataset.hpp"
#include "rejopt/lp.hpp"
#include "rejopt/rng.hpp"
#include "rejopt/sweep.hpp"

namespace testutil {

using namespace rejopt;

/// Random dataset; scores quantized to k/16 when `with_ties`, losses k/8.
inline ScoredDataset random_dataset(std::uint64_t seed, std::size_t n, bool with_ties,
                                    bool with_g = false) {
    SplitRng rng = SplitRng::substream(seed, 0);
    ScoredDataset ds;
    ds.has_score_g = with_g;
    ds.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ScoredSample s;
        s.is_ood = rng.next_unit() < 0.35;
        auto draw_score = [&] {
            const double u = rng.next_unit() * 4.0 - 2.0;
            return with_ties ? std::floor(u * 16.0) / 16.0 : u;
        };
        s.score_r = draw_score();
        if (with_g) s.score_g = draw_score();
        s.loss = s.is_ood ? 0.0 : std::floor(rng.next_unit() * 9.0) / 8.0;
        ds.samples.push_back(s);
    }
    if (ds.num_id() == 0) {
        ds.samples[0].is_ood = false;
        ds.samples[0].loss = 0.5;
    }
    return ds;
}

inline bool same_opt(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
}

/// Field-by-field equality of the estimator outputs (rules aside: the sweep
/// pins lambda at the group score, the oracle at a midpoint).
inline bool points_match(const OperatingPoint& sweep_pt, const OperatingPoint& brute_pt,
                         std::string& why) {
    if (sweep_pt.tpr != brute_pt.tpr) { why = "tpr"; return false; }
    if (sweep_pt.fpr != brute_pt.fpr) { why = "fpr"; return false; }
    if (sweep_pt.accepted_id != brute_pt.accepted_id) { why = "accepted_id"; return false; }
    if (sweep_pt.accepted_ood != brute_pt.accepted_ood) { why = "accepted_ood"; return false; }
    if (sweep_pt.accepted_correct != brute_pt.accepted_correct) { why = "accepted_correct"; return false; }
    if (!same_opt(sweep_pt.selective_risk, brute_pt.selective_risk)) { why = "risk"; return false; }
    if (!same_opt(sweep_pt.precision, brute_pt.precision)) { why = "precision"; return false; }
    return true;
}

/// Brute-force oracle: evaluates empirical_point at -inf and at the midpoint
/// above each distinct score, in ascending order.
inline std::vector<OperatingPoint> brute_force_sweep(const ScoredDataset& ds) {
    std::set<double> distinct;
    for (const auto& s : ds.samples) distinct.insert(s.score_r);
    std::vector<double> lams;
    lams.push_back(*distinct.begin() - 1.0);  // below everything: accept none
    for (auto it = distinct.begin(); it != distinct.end(); ++it) {
        auto nx = std::next(it);
        lams.push_back(nx == distinct.end() ? *it + 1.0 : 0.5 * (*it + *nx));
    }
    std::vector<OperatingPoint> out;
    for (double lam : lams) {
        SelectiveRule rule;
        rule.mu = 0.0;
        rule.lambda = lam;
        out.push_back(empirical_point(ds, rule));
    }
    return out;
}

/// AUROC by the rank statistic: P(s_id < s_ood) + P(s_id = s_ood)/2.
inline double rank_sum_auroc(const ScoredDataset& ds) {
    double wins = 0.0, pairs = 0.0;
    for (const auto& a : ds.samples) {
        if (a.is_ood) continue;
        for (const auto& b : ds.samples) {
            if (!b.is_ood) continue;
            pairs += 1.0;
            if (a.score_r < b.score_r)
                wins += 1.0;
            else if (a.score_r == b.score_r)
                wins += 0.5;
        }
    }
    return wins / pairs;
}

// --- LP oracle ---------------------------------------------------------------

struct LpOracleResult {
    bool feasible = false;
    double objective = 0.0;
    int max_fractional = 0;  // over all optimal vertices found
};

/// Exhaustive basic-solution enumeration for
///   min sum c_j x_j  s.t.  sum a_j x_j (=|>=) b0,  sum q_j x_j <= b1, 0<=x<=1.
/// Candidate vertices: every assignment of non-basic variables to a bound with
/// at most two basic variables solving the active constraint pattern.
inline LpOracleResult enumerate_lp(const std::vector<LpItem>& items, double phi_min,
                                   double rho_max, bool coverage_equality) {
    const std::size_t n = items.size();
    double sid = 0.0, sood = 0.0;
    for (const auto& it : items) { sid += it.p_id; sood += it.p_ood; }
    const double os = sood > 0.0 ? sood : 1.0;
    std::vector<double> a(n), q(n), c(n);
    for (std::size_t j = 0; j < n; ++j) {
        a[j] = items[j].p_id / sid;
        q[j] = items[j].p_ood / os;
        c[j] = items[j].risk_mass / sid / phi_min;
    }
    constexpr double tol = 1e-9;
    LpOracleResult res;
    std::vector<std::pair<double, std::vector<double>>> optima;

    auto consider = [&](const std::vector<double>& x) {
        double cov = 0.0, fp = 0.0, obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (x[j] < -tol || x[j] > 1.0 + tol) return;
            cov += a[j] * x[j];
            fp += q[j] * x[j];
            obj += c[j] * x[j];
        }
        const bool cov_ok =
            coverage_equality ? std::fabs(cov - phi_min) <= tol : cov >= phi_min - tol;
        if (!cov_ok || fp > rho_max + tol) return;
        if (!res.feasible || obj < res.objective - tol) {
            res.feasible = true;
            res.objective = obj;
            optima.clear();
        }
        if (std::fabs(obj - res.objective) <= tol) optima.push_back({obj, x});
    };

    // all-bound assignments with 0, 1 or 2 fractional coordinates solving the
    // active-constraint system
    const std::size_t combos = std::size_t{1} << n;
    std::vector<double> x(n);
    for (std::size_t mask = 0; mask < combos; ++mask) {
        for (std::size_t j = 0; j < n; ++j) x[j] = (mask >> j) & 1 ? 1.0 : 0.0;
        consider(x);
        // one fractional coordinate: solve row0 (coverage) or row1 (fpr) tight
        for (std::size_t f = 0; f < n; ++f) {
            if ((mask >> f) & 1) continue;  // enumerate with f starting at 0
            double cov = 0.0, fp = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == f) continue;
                cov += a[j] * x[j];
                fp += q[j] * x[j];
            }
            if (a[f] > tol) {
                x[f] = (phi_min - cov) / a[f];
                consider(x);
            }
            if (q[f] > tol) {
                x[f] = (rho_max - fp) / q[f];
                consider(x);
            }
            x[f] = 0.0;
            // two fractional coordinates: both rows tight
            for (std::size_t g2 = f + 1; g2 < n; ++g2) {
                if ((mask >> g2) & 1) continue;
                double cov2 = 0.0, fp2 = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == f || j == g2) continue;
                    cov2 += a[j] * x[j];
                    fp2 += q[j] * x[j];
                }
                const double det = a[f] * q[g2] - a[g2] * q[f];
                if (std::fabs(det) < 1e-12) continue;
                const double rb0 = phi_min - cov2, rb1 = rho_max - fp2;
                x[f] = (rb0 * q[g2] - a[g2] * rb1) / det;
                x[g2] = (a[f] * rb1 - rb0 * q[f]) / det;
                consider(x);
                x[f] = 0.0;
                x[g2] = 0.0;
            }
        }
    }
    for (const auto& [obj, xv] : optima) {
        int frac = 0;
        for (double v : xv)
            if (v > 1e-7 && v < 1.0 - 1e-7) ++frac;
        res.max_fractional = std::max(res.max_fractional, frac);
    }
    return res;
}

/// Random small LP instance; some items intentionally share scores or carry
/// zero masses to exercise degenerate corners.
inline LpInstance random_lp_instance(std::uint64_t seed, std::size_t max_items = 8) {
    SplitRng rng = SplitRng::substream(seed, 1);
    LpInstance inst;
    const std::size_t n = 2 + static_cast<std::size_t>(rng.next_unit() * (max_items - 1));
    double sid = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        LpItem it;
        it.p_id = rng.next_unit() < 0.15 ? 0.0 : 0.05 + rng.next_unit();
        it.p_ood = rng.next_unit() < 0.2 ? 0.0 : rng.next_unit();
        const double ratio = rng.next_unit() < 0.25 ? 0.25 : rng.next_unit();
        it.risk_mass = it.p_id * ratio;
        sid += it.p_id;
        inst.items.push_back(it);
    }
    if (sid <= 0.0) {
        inst.items[0].p_id = 1.0;
        inst.items[0].risk_mass = 0.25;
    }
    inst.phi_min = 0.1 + 0.8 * rng.next_unit();
    inst.rho_max = rng.next_unit();
    return inst;
}

}  // namespace testutil
