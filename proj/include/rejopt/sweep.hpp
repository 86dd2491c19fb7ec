#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rejopt/dataset.hpp"
#include "rejopt/rule.hpp"

namespace rejopt {

/// Sample precision kappa_n = (1-pi)*phi / ((1-pi)*phi + pi*rho).
inline std::optional<double> sample_precision(double tpr, double fpr, double pi) {
    const double den = (1.0 - pi) * tpr + pi * fpr;
    if (!(den > 0.0)) return std::nullopt;
    return (1.0 - pi) * tpr / den;
}

/// One attainable operating point of a thresholded family. Accepted counts
/// are sums of per-sample acceptance probabilities, so they are integers for
/// deterministic rules and fractional only under a randomized boundary.
struct OperatingPoint {
    SelectiveRule rule;
    double tpr = 0.0;
    double fpr = 0.0;
    std::optional<double> precision;
    std::optional<double> selective_risk;  // undefined iff accepted_id == 0
    double accepted_id = 0.0;
    double accepted_ood = 0.0;
    double accepted_correct = 0.0;  // accepted ID rows with zero loss
};

enum class ScoreSelector { R, G };

namespace detail {

struct SweepItem {
    double score;
    double loss;
    bool is_ood;
};

/// Running sums after each tie group; lambda = the group's score value.
struct SweepPoint {
    double lambda;
    double acc_id;
    double acc_ood;
    double loss_sum;
    double correct;
};

inline void fill_items(const ScoredDataset& ds, ScoreDirection dir,
                       std::vector<SweepItem>& items) {
    items.clear();
    items.reserve(ds.samples.size());
    for (const auto& s : ds.samples) {
        double sc;
        if (dir.sin_a == 0.0)
            sc = dir.cos_a * s.score_r;
        else if (dir.cos_a == 0.0)
            sc = dir.sin_a * s.score_g;
        else
            sc = dir.cos_a * s.score_r + dir.sin_a * s.score_g;
        items.push_back({sc, s.loss, s.is_ood});
    }
}

/// Single pass over score-sorted items: emits the accept-none point and one
/// point per distinct score; tied scores enter as one atomic group.
inline void sweep_points(std::vector<SweepItem>& items, std::vector<SweepPoint>& out) {
    std::sort(items.begin(), items.end(),
              [](const SweepItem& a, const SweepItem& b) { return a.score < b.score; });
    out.clear();
    out.reserve(items.size() + 1);
    out.push_back({-kInf, 0.0, 0.0, 0.0, 0.0});
    double acc_id = 0.0, acc_ood = 0.0, loss_sum = 0.0, correct = 0.0;
    std::size_t i = 0;
    while (i < items.size()) {
        const double s = items[i].score;
        do {
            if (items[i].is_ood) {
                acc_ood += 1.0;
            } else {
                acc_id += 1.0;
                loss_sum += items[i].loss;
                if (items[i].loss == 0.0) correct += 1.0;
            }
            ++i;
        } while (i < items.size() && items[i].score == s);
        out.push_back({s, acc_id, acc_ood, loss_sum, correct});
    }
}

inline OperatingPoint make_point(const SweepPoint& p, std::size_t n_id, std::size_t n_ood,
                                 double pi, const SelectiveRule& rule) {
    OperatingPoint op;
    op.rule = rule;
    op.rule.lambda = p.lambda;
    op.accepted_id = p.acc_id;
    op.accepted_ood = p.acc_ood;
    op.accepted_correct = p.correct;
    op.tpr = p.acc_id / static_cast<double>(n_id);
    op.fpr = n_ood ? p.acc_ood / static_cast<double>(n_ood) : 0.0;
    op.precision = sample_precision(op.tpr, op.fpr, pi);
    if (p.acc_id > 0.0) op.selective_risk = p.loss_sum / p.acc_id;
    return op;
}

}  // namespace detail

/// Evaluate one fixed rule on the dataset (the direct estimators).
inline OperatingPoint empirical_point(const ScoredDataset& ds, const SelectiveRule& rule) {
    ds.validate();
    const bool needs_g =
        rule.alpha ? direction_from_angle(*rule.alpha).sin_a != 0.0 : rule.mu != 0.0;
    if (needs_g && !ds.has_score_g)
        throw std::invalid_argument("empirical_point: rule needs score_g, dataset has none");
    OperatingPoint op;
    op.rule = rule;
    double loss_sum = 0.0;
    std::size_t n_id = 0, n_ood = 0;
    for (const auto& s : ds.samples) {
        const double c = rule.accept(rule.score(s.score_r, s.score_g));
        if (s.is_ood) {
            ++n_ood;
            op.accepted_ood += c;
        } else {
            ++n_id;
            op.accepted_id += c;
            loss_sum += c * s.loss;
            if (s.loss == 0.0) op.accepted_correct += c;
        }
    }
    op.tpr = op.accepted_id / static_cast<double>(n_id);
    op.fpr = n_ood ? op.accepted_ood / static_cast<double>(n_ood) : 0.0;
    op.precision = sample_precision(op.tpr, op.fpr, ds.pi_for_precision());
    if (op.accepted_id > 0.0) op.selective_risk = loss_sum / op.accepted_id;
    return op;
}

/**
 * All attainable operating points of c(x) = [score <= lambda] for one score
 * column, by a single sort-and-scan. Output size is #distinct scores + 1 and
 * points come in ascending-lambda order starting from accept-none.
 */
inline std::vector<OperatingPoint> sweep_single_score(const ScoredDataset& ds,
                                                      ScoreSelector selector) {
    ds.validate();
    if (selector == ScoreSelector::G && !ds.has_score_g)
        throw std::invalid_argument("sweep_single_score: dataset has no score_g");
    std::vector<detail::SweepItem> items;
    detail::fill_items(
        ds, selector == ScoreSelector::R ? ScoreDirection{1.0, 0.0} : ScoreDirection{0.0, 1.0},
        items);
    std::vector<detail::SweepPoint> pts;
    detail::sweep_points(items, pts);

    SelectiveRule base;
    base.mu = selector == ScoreSelector::R ? 0.0 : kInf;
    const std::size_t n_id = ds.num_id(), n_ood = ds.num_ood();
    const double pi = ds.pi_for_precision();
    std::vector<OperatingPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(detail::make_point(p, n_id, n_ood, pi, base));
    return out;
}

/// Sweep of the combined score r + mu*g (mu = +inf ranks by g alone).
inline std::vector<OperatingPoint> sweep_combined_score(const ScoredDataset& ds, double mu) {
    ds.validate();
    if (std::isinf(mu)) return sweep_single_score(ds, ScoreSelector::G);
    if (mu == 0.0) return sweep_single_score(ds, ScoreSelector::R);
    if (!ds.has_score_g)
        throw std::invalid_argument("sweep_combined_score: dataset has no score_g");
    std::vector<detail::SweepItem> items;
    items.reserve(ds.samples.size());
    for (const auto& s : ds.samples)
        items.push_back(
            {s.score_r + mu * s.score_g, s.loss, s.is_ood});
    std::vector<detail::SweepPoint> pts;
    detail::sweep_points(items, pts);
    SelectiveRule base;
    base.mu = mu;
    const std::size_t n_id = ds.num_id(), n_ood = ds.num_ood();
    const double pi = ds.pi_for_precision();
    std::vector<OperatingPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(detail::make_point(p, n_id, n_ood, pi, base));
    return out;
}

/**
 * Runs the sweep for each of `d` equidistant angles over [0, pi) and hands
 * the raw points to `visit(alpha, points)`. Buffers are reused across angles;
 * the visitor must not retain the span beyond the call.
 */
template <class Visitor>
void scan_double_grid(const ScoredDataset& ds, int d, Visitor&& visit) {
    ds.validate();
    if (!ds.has_score_g)
        throw std::invalid_argument("scan_double_grid: dataset has no score_g");
    if (d < 2) throw std::invalid_argument("scan_double_grid: need d >= 2");
    std::vector<detail::SweepItem> items;
    std::vector<detail::SweepPoint> pts;
    for (int j = 0; j < d; ++j) {
        const double alpha = M_PI * static_cast<double>(j) / d;
        detail::fill_items(ds, direction_from_angle(alpha), items);
        detail::sweep_points(items, pts);
        visit(alpha, pts);
    }
}

}  // namespace rejopt
