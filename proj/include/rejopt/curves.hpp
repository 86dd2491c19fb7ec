#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "rejopt/format.hpp"
#include "rejopt/sweep.hpp"
#include "rejopt/tuning.hpp"

namespace rejopt {

enum class CurveKind { Roc, Pr, RcAtFpr, CcrFpr };

/// CCR convention: Plain is 1 - R^S_n on the accepted rows (0 when nothing is
/// accepted); CoverageWeighted is accepted-correct / all-ID.
enum class CcrWeighting { Plain, CoverageWeighted };

struct CurvePoint {
    double x;
    double y;
};

struct CurveSeries {
    CurveKind kind = CurveKind::Roc;
    std::vector<CurvePoint> points;
    std::string meta;  // generating family and any fixed constraint
};

inline const char* curve_kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::Roc: return "roc";
        case CurveKind::Pr: return "pr";
        case CurveKind::RcAtFpr: return "rc_at_fpr";
        default: return "ccr_fpr";
    }
}

/// Signed trapezoid area of the series in stored order.
inline double trapezoid(const CurveSeries& c) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i)
        acc += 0.5 * (c.points[i].y + c.points[i + 1].y) *
               (c.points[i + 1].x - c.points[i].x);
    return acc;
}

inline std::string family_meta(const ScoreFamily& f) {
    switch (f.kind) {
        case ScoreFamily::Kind::SingleR: return "family=score_r";
        case ScoreFamily::Kind::SingleG: return "family=score_g";
        case ScoreFamily::Kind::FixedMu: return "family=mu:" + format_double(f.mu);
        default: return "family=double(d=" + std::to_string(f.grid_size) + ")";
    }
}

namespace detail {

inline std::vector<double> unit_grid(int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
    return g;
}

inline void run_family_sweep(const ScoredDataset& ds, const ScoreFamily& f,
                             std::vector<SweepPoint>& pts) {
    std::vector<SweepItem> items;
    switch (f.kind) {
        case ScoreFamily::Kind::SingleR: fill_items(ds, {1.0, 0.0}, items); break;
        case ScoreFamily::Kind::SingleG:
            if (!ds.has_score_g) throw DatasetError("curve: dataset has no score_g");
            fill_items(ds, {0.0, 1.0}, items);
            break;
        case ScoreFamily::Kind::FixedMu:
            if (!ds.has_score_g) throw DatasetError("curve: dataset has no score_g");
            items.reserve(ds.samples.size());
            for (const auto& s : ds.samples)
                items.push_back({s.score_r + f.mu * s.score_g, s.loss, s.is_ood});
            break;
        default:
            throw std::invalid_argument("run_family_sweep: double family needs the grid scan");
    }
    sweep_points(items, pts);
}

struct PointStats {
    double tpr, fpr, ccr_plain, ccr_weighted;
    std::optional<double> risk, kappa;
};

inline PointStats point_stats(const SweepPoint& p, std::size_t n_id, std::size_t n_ood,
                              double pi) {
    PointStats st;
    st.tpr = p.acc_id / static_cast<double>(n_id);
    st.fpr = n_ood ? p.acc_ood / static_cast<double>(n_ood) : 0.0;
    if (p.acc_id > 0.0) st.risk = p.loss_sum / p.acc_id;
    st.ccr_plain = st.risk ? 1.0 - *st.risk : 0.0;
    st.ccr_weighted = p.correct / static_cast<double>(n_id);
    st.kappa = sample_precision(st.tpr, st.fpr, pi);
    return st;
}

inline void push_dedup(std::vector<CurvePoint>& pts, double x, double y) {
    if (!pts.empty() && pts.back().x == x && pts.back().y == y) return;
    pts.push_back({x, y});
}

}  // namespace detail

/**
 * ROC of the attainable (FPR, TPR) set. Single-score families emit every
 * sweep point in threshold order; the double-score family reports, for each
 * rho_max on the grid, the maximal feasible TPR over all (alpha, lambda).
 */
inline CurveSeries roc_curve(const ScoredDataset& ds, const ScoreFamily& family,
                             int grid_size = 201) {
    ds.validate();
    if (ds.num_ood() == 0) throw DatasetError("roc: score file has no OOD rows");
    const std::size_t n_id = ds.num_id(), n_ood = ds.num_ood();
    const double pi = ds.pi_for_precision();
    CurveSeries out;
    out.kind = CurveKind::Roc;
    out.meta = family_meta(family);
    if (family.kind != ScoreFamily::Kind::DoubleGrid) {
        std::vector<detail::SweepPoint> pts;
        detail::run_family_sweep(ds, family, pts);
        for (const auto& p : pts) {
            const auto st = detail::point_stats(p, n_id, n_ood, pi);
            detail::push_dedup(out.points, st.fpr, st.tpr);
        }
        return out;
    }
    const auto grid = detail::unit_grid(grid_size);
    std::vector<double> best(grid.size(), 0.0);
    scan_double_grid(ds, family.grid_size,
                     [&](double, const std::vector<detail::SweepPoint>& pts) {
                         for (const auto& p : pts) {
                             const double fpr =
                                 p.acc_ood / static_cast<double>(n_ood);
                             const double tpr = p.acc_id / static_cast<double>(n_id);
                             const auto it = std::lower_bound(grid.begin(), grid.end(), fpr);
                             const auto idx = static_cast<std::size_t>(it - grid.begin());
                             if (idx < best.size()) best[idx] = std::max(best[idx], tpr);
                         }
                     });
    for (std::size_t i = 1; i < best.size(); ++i) best[i] = std::max(best[i], best[i - 1]);
    for (std::size_t i = 0; i < grid.size(); ++i) out.points.push_back({grid[i], best[i]});
    return out;
}

/// Trapezoidal area under a ROC series; equals the rank statistic
/// P(s_id < s_ood) + P(s_id = s_ood)/2 for single-score sweeps.
inline double auroc(const CurveSeries& roc) { return trapezoid(roc); }

/**
 * Precision-Recall curve: recall on x, precision on y. Points with zero
 * recall are skipped (0/0 precision). Double-score: for each phi_min on the
 * grid, the maximal feasible precision.
 */
inline CurveSeries pr_curve(const ScoredDataset& ds, const ScoreFamily& family, double pi,
                            int grid_size = 201) {
    ds.validate();
    const std::size_t n_id = ds.num_id(), n_ood = ds.num_ood();
    CurveSeries out;
    out.kind = CurveKind::Pr;
    out.meta = family_meta(family) + " pi=" + format_double(pi);
    if (family.kind != ScoreFamily::Kind::DoubleGrid) {
        std::vector<detail::SweepPoint> pts;
        detail::run_family_sweep(ds, family, pts);
        for (const auto& p : pts) {
            const auto st = detail::point_stats(p, n_id, n_ood, pi);
            if (st.tpr > 0.0 && st.kappa) detail::push_dedup(out.points, st.tpr, *st.kappa);
        }
        return out;
    }
    const auto grid = detail::unit_grid(grid_size);
    std::vector<double> best(grid.size(), -1.0);
    scan_double_grid(
        ds, family.grid_size, [&](double, const std::vector<detail::SweepPoint>& pts) {
            for (const auto& p : pts) {
                const auto st = detail::point_stats(p, n_id, n_ood, pi);
                if (!(st.tpr > 0.0) || !st.kappa) continue;
                // contributes to every grid recall target <= tpr
                const auto it = std::upper_bound(grid.begin(), grid.end(), st.tpr);
                if (it == grid.begin()) continue;
                const auto idx = static_cast<std::size_t>(it - grid.begin()) - 1;
                best[idx] = std::max(best[idx], *st.kappa);
            }
        });
    for (std::size_t i = best.size(); i-- > 1;) best[i - 1] = std::max(best[i - 1], best[i]);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (best[i] >= 0.0) out.points.push_back({grid[i], best[i]});
    return out;
}

inline double aupr(const CurveSeries& pr) { return trapezoid(pr); }

struct RcCurve {
    CurveSeries series;
    std::optional<double> phi_max;  // maximal attainable coverage of the family
};

/**
 * Risk-Coverage at a fixed FPR budget: for each phi_min on the grid, the
 * minimal selective risk among rules with rho_n <= rho_max and tpr >= phi_min.
 * The curve ends at the family's maximal attainable coverage.
 */
inline RcCurve rc_at_fpr(const ScoredDataset& ds, const ScoreFamily& family, double rho_max,
                         int grid_size = 201) {
    ds.validate();
    if (!(rho_max >= 0.0 && rho_max <= 1.0))
        throw std::invalid_argument("rc_at_fpr: rho_max must be in [0,1]");
    const std::size_t n_id = ds.num_id(), n_ood = ds.num_ood();
    const double pi = ds.pi_for_precision();
    const auto grid = detail::unit_grid(grid_size);
    std::vector<double> best(grid.size(), kInf);
    std::optional<double> phi_max;

    auto consume = [&](const std::vector<detail::SweepPoint>& pts) {
        for (const auto& p : pts) {
            const auto st = detail::point_stats(p, n_id, n_ood, pi);
            if (st.fpr > rho_max || !st.risk) continue;
            if (!phi_max || st.tpr > *phi_max) phi_max = st.tpr;
            const auto it = std::upper_bound(grid.begin(), grid.end(), st.tpr);
            if (it == grid.begin()) continue;
            const auto idx = static_cast<std::size_t>(it - grid.begin()) - 1;
            best[idx] = std::min(best[idx], *st.risk);
        }
    };
    if (family.kind == ScoreFamily::Kind::DoubleGrid) {
        scan_double_grid(ds, family.grid_size,
                         [&](double, const std::vector<detail::SweepPoint>& pts) { consume(pts); });
    } else {
        std::vector<detail::SweepPoint> pts;
        detail::run_family_sweep(ds, family, pts);
        consume(pts);
    }
    for (std::size_t i = best.size(); i-- > 1;) best[i - 1] = std::min(best[i - 1], best[i]);
    RcCurve out;
    out.series.kind = CurveKind::RcAtFpr;
    out.series.meta = family_meta(family) + " rho_max=" + format_double(rho_max);
    out.phi_max = phi_max;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::isfinite(best[i])) out.series.points.push_back({grid[i], best[i]});
    return out;
}

/**
 * CCR versus FPR for one score direction. Plain CCR is 1 - R^S_n with the
 * empty-acceptance point pinned at (0,0).
 */
inline CurveSeries ccr_fpr_curve(const ScoredDataset& ds, const ScoreFamily& family,
                                 CcrWeighting weighting = CcrWeighting::Plain) {
    ds.validate();
    const std::size_t n_id = ds.num_id(), n_ood = ds.num_ood();
    const double pi = ds.pi_for_precision();
    CurveSeries out;
    out.kind = CurveKind::CcrFpr;

    auto build = [&](const std::vector<detail::SweepPoint>& pts, std::vector<CurvePoint>& dst) {
        dst.clear();
        for (const auto& p : pts) {
            const auto st = detail::point_stats(p, n_id, n_ood, pi);
            const double ccr =
                weighting == CcrWeighting::Plain ? st.ccr_plain : st.ccr_weighted;
            if (!dst.empty() && dst.back().x == st.fpr && dst.back().y == ccr) continue;
            dst.push_back({st.fpr, ccr});
        }
    };

    if (family.kind != ScoreFamily::Kind::DoubleGrid) {
        std::vector<detail::SweepPoint> pts;
        detail::run_family_sweep(ds, family, pts);
        build(pts, out.points);
        out.meta = family_meta(family);
        return out;
    }
    // Two free parameters make "max CCR at fixed FPR" degenerate (accepting a
    // single correct row gives CCR 1), so the family's curve is the best
    // single direction by area.
    double best_area = -kInf, best_alpha = 0.0;
    std::vector<CurvePoint> buf, best_points;
    scan_double_grid(ds, family.grid_size,
                     [&](double alpha, const std::vector<detail::SweepPoint>& pts) {
                         build(pts, buf);
                         double area = 0.0;
                         for (std::size_t i = 0; i + 1 < buf.size(); ++i)
                             area += 0.5 * (buf[i].y + buf[i + 1].y) *
                                     (buf[i + 1].x - buf[i].x);
                         if (area > best_area) {
                             best_area = area;
                             best_alpha = alpha;
                             best_points = buf;
                         }
                     });
    out.points = std::move(best_points);
    out.meta = family_meta(family) + " alpha=" + format_double(best_alpha);
    return out;
}

/// Area under the CCR-FPR curve of a single score column.
inline double oscr(const ScoredDataset& ds, ScoreSelector selector,
                   CcrWeighting weighting = CcrWeighting::Plain) {
    const auto family =
        selector == ScoreSelector::R ? ScoreFamily::single_r() : ScoreFamily::single_g();
    return trapezoid(ccr_fpr_curve(ds, family, weighting));
}

/// Area under the family's CCR-FPR curve (best direction for double-score).
inline double oscr_family(const ScoredDataset& ds, const ScoreFamily& family,
                          CcrWeighting weighting = CcrWeighting::Plain) {
    return trapezoid(ccr_fpr_curve(ds, family, weighting));
}

/// CSV form: a comment header naming kind and constraints, then x,y rows.
inline void write_curve_csv(std::ostream& out, const CurveSeries& c) {
    out << "# kind=" << curve_kind_name(c.kind);
    if (!c.meta.empty()) out << ' ' << c.meta;
    out << "\nx,y\n";
    for (const auto& p : c.points)
        out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

}  // namespace rejopt
