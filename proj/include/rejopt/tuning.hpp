#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rejopt/sweep.hpp"

namespace rejopt {

enum class TuneMode { TprFpr, PrecRecall };

struct TuningTargets {
    double phi_min = 0.0;
    std::optional<double> rho_max;    // TPR-FPR mode
    std::optional<double> kappa_min;  // Precision-Recall mode

    void validate(TuneMode mode) const {
        if (!(phi_min >= 0.0 && phi_min <= 1.0))
            throw std::invalid_argument("targets: phi_min must be in [0,1]");
        if (mode == TuneMode::TprFpr) {
            if (!rho_max) throw std::invalid_argument("targets: rho_max required");
            if (!(*rho_max >= 0.0 && *rho_max <= 1.0))
                throw std::invalid_argument("targets: rho_max must be in [0,1]");
        } else {
            if (!kappa_min) throw std::invalid_argument("targets: kappa_min required");
            if (!(*kappa_min >= 0.0 && *kappa_min <= 1.0))
                throw std::invalid_argument("targets: kappa_min must be in [0,1]");
        }
    }
};

/// The family of candidate rules a tuner searches over.
struct ScoreFamily {
    enum class Kind { SingleR, SingleG, FixedMu, DoubleGrid } kind = Kind::SingleR;
    double mu = 0.0;       // FixedMu
    int grid_size = 360;   // DoubleGrid

    static ScoreFamily single_r() { return {Kind::SingleR, 0.0, 0}; }
    static ScoreFamily single_g() { return {Kind::SingleG, kInf, 0}; }
    static ScoreFamily fixed_mu(double mu) { return {Kind::FixedMu, mu, 0}; }
    static ScoreFamily double_grid(int d = 360) { return {Kind::DoubleGrid, 0.0, d}; }
};

/// Attainable extremes reported alongside an infeasible verdict.
struct Frontier {
    std::optional<double> max_tpr_within_fpr;    // max phi subject to rho <= rho_max
    std::optional<double> min_fpr_within_tpr;    // min rho subject to phi >= phi_min
    std::optional<double> max_tpr_within_kappa;  // max phi subject to kappa >= kappa_min
    std::optional<double> max_kappa_within_tpr;  // max kappa subject to phi >= phi_min
};

struct TuneResult {
    std::optional<OperatingPoint> best;  // empty means infeasible ("unable")
    Frontier frontier;

    bool feasible() const { return best.has_value(); }
};

namespace detail {

/// Minimal risk, then larger coverage, then smaller threshold.
inline bool strictly_better(const OperatingPoint& a, const OperatingPoint& b) {
    if (*a.selective_risk != *b.selective_risk) return *a.selective_risk < *b.selective_risk;
    if (a.tpr != b.tpr) return a.tpr > b.tpr;
    return a.rule.lambda < b.rule.lambda;
}

class TuneScan {
public:
    TuneScan(TuneMode mode, const TuningTargets& targets, double pi, std::size_t n_id,
             std::size_t n_ood)
        : mode_(mode), targets_(targets), pi_(pi), n_id_(n_id), n_ood_(n_ood) {
        targets.validate(mode);
    }

    void consume(const SweepPoint& p, const SelectiveRule& base) {
        const double tpr = p.acc_id / static_cast<double>(n_id_);
        const double fpr = n_ood_ ? p.acc_ood / static_cast<double>(n_ood_) : 0.0;
        const auto kappa = sample_precision(tpr, fpr, pi_);
        const bool tpr_ok = tpr >= targets_.phi_min;
        bool other_ok;
        if (mode_ == TuneMode::TprFpr) {
            other_ok = fpr <= *targets_.rho_max;
            if (other_ok) grow(frontier_.max_tpr_within_fpr, tpr, false);
            if (tpr_ok) grow(frontier_.min_fpr_within_tpr, fpr, true);
        } else {
            // kappa undefined (nothing accepted) never satisfies the constraint
            other_ok = kappa && *kappa >= *targets_.kappa_min;
            if (other_ok) grow(frontier_.max_tpr_within_kappa, tpr, false);
            if (tpr_ok && kappa) grow(frontier_.max_kappa_within_tpr, *kappa, false);
        }
        if (!tpr_ok || !other_ok || !(p.acc_id > 0.0)) return;
        OperatingPoint op = make_point(p, n_id_, n_ood_, pi_, base);
        if (!best_ || strictly_better(op, *best_)) best_ = op;
    }

    TuneResult result() && {
        TuneResult r;
        r.best = std::move(best_);
        r.frontier = frontier_;
        return r;
    }

private:
    static void grow(std::optional<double>& slot, double v, bool min) {
        if (!slot || (min ? v < *slot : v > *slot)) slot = v;
    }

    TuneMode mode_;
    TuningTargets targets_;
    double pi_;
    std::size_t n_id_, n_ood_;
    std::optional<OperatingPoint> best_;
    Frontier frontier_;
};

inline TuneResult tune_family(const ScoredDataset& ds, const ScoreFamily& family,
                              const TuningTargets& targets, TuneMode mode, double pi) {
    ds.validate();
    TuneScan scan(mode, targets, pi, ds.num_id(), ds.num_ood());
    if (family.kind == ScoreFamily::Kind::DoubleGrid) {
        scan_double_grid(ds, family.grid_size, [&](double alpha, const std::vector<SweepPoint>& pts) {
            SelectiveRule base;
            base.alpha = alpha;
            for (const auto& p : pts) scan.consume(p, base);
        });
    } else {
        std::vector<SweepItem> items;
        SelectiveRule base;
        switch (family.kind) {
            case ScoreFamily::Kind::SingleR:
                fill_items(ds, {1.0, 0.0}, items);
                base.mu = 0.0;
                break;
            case ScoreFamily::Kind::SingleG:
                if (!ds.has_score_g)
                    throw std::invalid_argument("tune: dataset has no score_g");
                fill_items(ds, {0.0, 1.0}, items);
                base.mu = kInf;
                break;
            default:
                if (!ds.has_score_g)
                    throw std::invalid_argument("tune: dataset has no score_g");
                items.reserve(ds.samples.size());
                for (const auto& s : ds.samples)
                    items.push_back({s.score_r + family.mu * s.score_g, s.loss, s.is_ood});
                base.mu = family.mu;
                break;
        }
        std::vector<SweepPoint> pts;
        sweep_points(items, pts);
        for (const auto& p : pts) scan.consume(p, base);
    }
    return std::move(scan).result();
}

}  // namespace detail

/// Best rule under phi_n >= phi_min and rho_n <= rho_max (empty if infeasible).
inline TuneResult tune_tpr_fpr(const ScoredDataset& ds, const ScoreFamily& family,
                               const TuningTargets& targets) {
    return detail::tune_family(ds, family, targets, TuneMode::TprFpr, ds.pi_for_precision());
}

/// Best rule under phi_n >= phi_min and kappa_n >= kappa_min at the given prior.
inline TuneResult tune_prec_recall(const ScoredDataset& ds, const ScoreFamily& family,
                                   const TuningTargets& targets, double pi) {
    return detail::tune_family(ds, family, targets, TuneMode::PrecRecall, pi);
}

/// Constrained search over the full angular grid (both scores required).
inline TuneResult double_score_grid(const ScoredDataset& ds, const TuningTargets& targets,
                                    TuneMode mode, int d = 360) {
    const double pi = ds.pi_for_precision();
    return detail::tune_family(ds, ScoreFamily::double_grid(d), targets, mode, pi);
}

}  // namespace rejopt
