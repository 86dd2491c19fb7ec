#pragma once

#include <cmath>
#include <optional>

#include "rejopt/math.hpp"

namespace rejopt {

/// Direction cosines for an angular score mix; components below 1e-15 are
/// snapped to exact 0/1 so grid directions hit the pure axes bit-exactly.
struct ScoreDirection {
    double cos_a = 1.0;
    double sin_a = 0.0;
};

inline ScoreDirection direction_from_angle(double alpha) {
    double c = std::cos(alpha), s = std::sin(alpha);
    if (std::fabs(c) < 1e-15) c = 0.0;
    if (std::fabs(s) < 1e-15) s = 0.0;
    if (std::fabs(c) > 1.0 - 1e-15) c = c > 0 ? 1.0 : -1.0;
    if (std::fabs(s) > 1.0 - 1e-15) s = s > 0 ? 1.0 : -1.0;
    return {c, s};
}

/**
 * A thresholded acceptance rule over the pair of scores (r, g):
 * accept if score < lambda, reject if score > lambda, accept with probability
 * boundary_accept at equality. The score is r + mu*g, with two special forms:
 * mu = +inf ranks by g alone, and a set angle uses r*cos(a) + g*sin(a).
 */
struct SelectiveRule {
    double mu = 0.0;
    double lambda = 0.0;
    double boundary_accept = 1.0;
    std::optional<double> alpha;

    double score(double r, double g) const {
        if (alpha) {
            const auto d = direction_from_angle(*alpha);
            return d.cos_a * r + d.sin_a * g;
        }
        if (std::isinf(mu)) return mu > 0 ? g : -g;
        return r + mu * g;
    }

    /// Acceptance probability for a score value.
    double accept(double s) const {
        if (s < lambda) return 1.0;
        if (s > lambda) return 0.0;
        return boundary_accept;
    }
};

inline SelectiveRule pure_r_rule(double lambda) { return {0.0, lambda, 1.0, std::nullopt}; }
inline SelectiveRule pure_g_rule(double lambda) { return {kInf, lambda, 1.0, std::nullopt}; }

}  // namespace rejopt
