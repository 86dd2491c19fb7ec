#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rejopt/quadrature.hpp"
#include "rejopt/rule.hpp"
#include "rejopt/synth.hpp"

namespace rejopt {

/// Cost-model score s_C(x) = r(x) + (eps2-eps3) * pi/(1-pi) * g(x).
inline double cost_score(const SyntheticSetup& s, double x) {
    const double r = conditional_risk(s, x);
    const double coef = (s.costs.accept_ood - s.costs.reject_ood) * s.pi / (1.0 - s.pi);
    if (coef == 0.0) return r;
    const double g = likelihood_ratio(s, x);
    if (std::isinf(g)) return kInf;
    return r + coef * g;
}

/// Optimal cost-model rule: accept iff s_C(x) <= eps1 (boundary fixed to 1).
inline SelectiveRule cost_optimal_rule(const SyntheticSetup& s) {
    s.validate();
    SelectiveRule rule;
    rule.mu = (s.costs.accept_ood - s.costs.reject_ood) * s.pi / (1.0 - s.pi);
    rule.lambda = s.costs.reject_id;
    rule.boundary_accept = 1.0;
    return rule;
}

struct TheoreticalReport {
    double risk = 0.0;  // cost-model expected risk
    double tpr = 0.0;
    double fpr = 0.0;
    std::optional<double> precision;       // undefined when nothing is accepted
    std::optional<double> selective_risk;  // undefined when tpr == 0
};

class UnattainableError : public std::runtime_error {
public:
    UnattainableError(const std::string& what, double attainable_extremum)
        : std::runtime_error(what), attainable(attainable_extremum) {}
    double attainable;
};

/**
 * Quadrature workspace for one setup. Panel edges carry the Bayes-boundary
 * kinks of the risk integrand; acceptance-region jumps are handled per rule
 * by splitting panels at the refined roots of score(x) = lambda.
 */
class TheoryContext {
public:
    explicit TheoryContext(const SyntheticSetup& setup) : setup_(setup) {
        setup_.validate();
        edges_ = quad::edges(quad::kLo, quad::kHi, quad::kPanels, bayes_kinks());
    }

    const SyntheticSetup& setup() const { return setup_; }

    double rule_score(const SelectiveRule& rule, double x) const {
        return rule.score(conditional_risk(setup_, x), likelihood_ratio(setup_, x));
    }

    struct AcceptedMass {
        double tpr = 0.0;       // integral of p_id over the accepted region
        double fpr = 0.0;       // integral of p_ood
        double risk_num = 0.0;  // integral of p_id * conditional_risk
    };

    AcceptedMass accepted_mass(const SelectiveRule& rule) const {
        AcceptedMass out;
        const auto s = [&](double x) { return rule_score(rule, x); };
        std::vector<double> roots = level_crossings(s, rule.lambda);
        std::size_t next_root = 0;
        for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
            double a = edges_[i];
            const double b = edges_[i + 1];
            // sub-segments between crossings alternate accepted/rejected
            while (true) {
                double cut = b;
                if (next_root < roots.size() && roots[next_root] < b)
                    cut = roots[next_root];
                if (cut > a && s(0.5 * (a + cut)) <= rule.lambda) add_segment(a, cut, out);
                if (cut == b) break;
                ++next_root;
                a = cut;
            }
        }
        return out;
    }

    TheoreticalReport report(const SelectiveRule& rule) const {
        const AcceptedMass m = accepted_mass(rule);
        TheoreticalReport rep;
        rep.tpr = std::clamp(m.tpr, 0.0, 1.0);
        rep.fpr = std::clamp(m.fpr, 0.0, 1.0);
        const double pi = setup_.pi;
        const double den = rep.fpr * pi + rep.tpr * (1.0 - pi);
        if (den > 0.0) rep.precision = (1.0 - pi) * rep.tpr / den;
        if (rep.tpr > 0.0) rep.selective_risk = m.risk_num / m.tpr;
        // expected cost: pi*(eps3 + (eps2-eps3)*fpr)
        //              + (1-pi)*(accepted ID loss + eps1*(1-tpr))
        const Costs& c = setup_.costs;
        rep.risk = pi * (c.reject_ood + (c.accept_ood - c.reject_ood) * rep.fpr) +
                   (1.0 - pi) * (m.risk_num + c.reject_id * (1.0 - rep.tpr));
        return rep;
    }

    struct Target {
        enum class Kind { Tpr, Fpr } kind;
        double value;
    };

    /**
     * Smallest-bisection threshold such that the rule (mu, lambda) attains the
     * target TPR or FPR within 1e-6. Throws UnattainableError carrying the
     * attainable extremum when the target lies outside the bracket range.
     */
    double invert_threshold(double mu, Target target) const {
        if (!(target.value >= 0.0 && target.value <= 1.0))
            throw std::invalid_argument("invert_threshold: target must be in [0,1]");
        SelectiveRule rule;
        rule.mu = mu;
        auto metric = [&](double lambda) {
            rule.lambda = lambda;
            const AcceptedMass m = accepted_mass(rule);
            return target.kind == Target::Kind::Tpr ? m.tpr : m.fpr;
        };
        auto [lo, hi] = score_bracket(rule);
        const double at_hi = metric(hi);
        if (target.value >= at_hi) {
            if (target.value <= at_hi + 1e-6) return hi;
            throw UnattainableError("invert_threshold: target above attainable range", at_hi);
        }
        // the bracket floor is the empty rule; targets at or below its metric
        // are only reachable by accepting nothing, which is degenerate
        const double at_lo = metric(lo);
        if (target.value <= at_lo)
            throw UnattainableError("invert_threshold: target below attainable range", at_lo);
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            mid = 0.5 * (lo + hi);
            const double v = metric(mid);
            if (std::fabs(v - target.value) <= 1e-6) return mid;
            (v < target.value ? lo : hi) = mid;
        }
        return mid;
    }

    /// Score range over the panel edges, widened by a 10% margin.
    std::pair<double, double> score_bracket(const SelectiveRule& rule) const {
        double lo = kInf, hi = -kInf;
        for (double x : edges_) {
            const double v = rule_score(rule, x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double margin = std::max(0.1 * (hi - lo), 1e-9);
        return {lo - margin, hi + margin};
    }

private:
    void add_segment(double a, double b, AcceptedMass& out) const {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (std::size_t i = 0; i < quad::kNodes.size(); ++i) {
            for (double x : {c - h * quad::kNodes[i], c + h * quad::kNodes[i]}) {
                const double w = quad::kWeights[i] * h;
                const double pid = pdf_id(setup_, x);
                out.tpr += w * pid;
                out.fpr += w * pdf_ood(setup_, x);
                out.risk_num += w * pid * conditional_risk(setup_, x);
            }
        }
    }

    /// Refined roots of f(x) = level along the base grid (edges + midpoints).
    std::vector<double> level_crossings(const std::function<double(double)>& f,
                                        double level) const {
        std::vector<double> roots;
        auto sgn = [&](double x) { return f(x) <= level; };
        double prev_x = edges_.front();
        bool prev_s = sgn(prev_x);
        auto scan = [&](double x) {
            const bool cur = sgn(x);
            if (cur != prev_s) {
                double a = prev_x, b = x;
                for (int it = 0; it < 80 && (b - a) > 1e-14 * (1.0 + std::fabs(a)); ++it) {
                    const double m = 0.5 * (a + b);
                    (sgn(m) == prev_s ? a : b) = m;
                }
                roots.push_back(0.5 * (a + b));
            }
            prev_x = x;
            prev_s = cur;
        };
        for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
            scan(0.5 * (edges_[i] + edges_[i + 1]));
            scan(edges_[i + 1]);
        }
        return roots;
    }

    /// Points where the Bayes label switches (kinks of p_id * conditional_risk).
    std::vector<double> bayes_kinks() const {
        std::vector<double> kinks;
        const int probes = 4 * quad::kPanels;
        auto at = [&](int i) {
            return quad::kLo + (quad::kHi - quad::kLo) * static_cast<double>(i) / probes;
        };
        int prev = bayes_classifier(setup_, at(0));
        for (int i = 1; i <= probes; ++i) {
            const int cur = bayes_classifier(setup_, at(i));
            if (cur != prev) {
                const auto& ca = setup_.id_components[static_cast<std::size_t>(prev - 1)];
                const auto& cb = setup_.id_components[static_cast<std::size_t>(cur - 1)];
                auto diff = [&](double x) {
                    return ca.weight * norm_pdf(x, ca.mean, ca.variance) -
                           cb.weight * norm_pdf(x, cb.mean, cb.variance);
                };
                double a = at(i - 1), b = at(i);
                const bool sa = diff(a) > 0.0;
                for (int it = 0; it < 80; ++it) {
                    const double m = 0.5 * (a + b);
                    ((diff(m) > 0.0) == sa ? a : b) = m;
                }
                kinks.push_back(0.5 * (a + b));
            }
            prev = cur;
        }
        return kinks;
    }

    SyntheticSetup setup_;
    std::vector<double> edges_;
};

inline TheoreticalReport theoretical_report(const SyntheticSetup& s, const SelectiveRule& rule) {
    return TheoryContext(s).report(rule);
}

inline double invert_threshold(const SyntheticSetup& s, double mu, TheoryContext::Target target) {
    return TheoryContext(s).invert_threshold(mu, target);
}

}  // namespace rejopt
