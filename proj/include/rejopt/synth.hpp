#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rejopt/math.hpp"
#include "rejopt/rng.hpp"

namespace rejopt {

/// Label value marking an outlier sample (ID classes are 1..K).
inline constexpr int kOutlierLabel = 0;

struct GaussComponent {
    double weight = 1.0;
    double mean = 0.0;
    double variance = 1.0;
};

struct Costs {
    double reject_id = 0.5;    // eps1: rejecting an ID sample
    double accept_ood = 1.0;   // eps2: predicting on an OOD sample
    double reject_ood = 0.0;   // eps3: correctly rejecting an OOD sample
};

class SetupError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown by operations conditioned on p_id(x) > 0.
class ZeroDensityError : public std::domain_error {
public:
    explicit ZeroDensityError(double x)
        : std::domain_error("zero ID density at x=" + std::to_string(x)) {}
};

/// Mixture density of an unnormalized component list.
inline double mixture_pdf(const std::vector<GaussComponent>& comps, double x) {
    double acc = 0.0;
    for (const auto& c : comps) acc += c.weight * norm_pdf(x, c.mean, c.variance);
    return acc;
}

/**
 * 1-D synthetic world: a K-component Gaussian ID mixture, a single Gaussian
 * outlier component, the outlier prior, and the cost constants.
 */
struct SyntheticSetup {
    std::vector<GaussComponent> id_components;  // one per label 1..K
    GaussComponent ood;                         // weight fixed to 1
    double pi = 0.25;                           // P(sample is OOD)
    Costs costs;

    int num_labels() const { return static_cast<int>(id_components.size()); }

    void validate() const {
        if (id_components.empty()) throw SetupError("setup: no ID components");
        double wsum = 0.0;
        for (const auto& c : id_components) {
            if (c.weight < 0.0) throw SetupError("setup: negative component weight");
            if (!(c.variance > 0.0)) throw SetupError("setup: component variance must be > 0");
            wsum += c.weight;
        }
        if (std::fabs(wsum - 1.0) > 1e-12)
            throw SetupError("setup: ID component weights must sum to 1");
        if (!(ood.variance > 0.0)) throw SetupError("setup: ood variance must be > 0");
        if (!(pi >= 0.0 && pi < 1.0)) throw SetupError("setup: pi must be in [0,1)");
        if (costs.reject_id < 0.0 || costs.accept_ood < 0.0 || costs.reject_ood < 0.0)
            throw SetupError("setup: costs must be nonnegative");
        if (!(costs.accept_ood > costs.reject_ood))
            throw SetupError("setup: eps2 > eps3 is required");
    }
};

inline double pdf_id(const SyntheticSetup& s, double x) { return mixture_pdf(s.id_components, x); }

inline double pdf_ood(const SyntheticSetup& s, double x) {
    return norm_pdf(x, s.ood.mean, s.ood.variance);
}

/// Posterior mode under 0/1 loss; ties go to the smallest label index.
inline int bayes_classifier(const SyntheticSetup& s, double x) {
    double best = -1.0;
    int label = 0;
    for (int y = 0; y < s.num_labels(); ++y) {
        const auto& c = s.id_components[static_cast<std::size_t>(y)];
        const double d = c.weight * norm_pdf(x, c.mean, c.variance);
        if (d > best) {
            best = d;
            label = y + 1;
        }
    }
    if (!(best > 0.0)) throw ZeroDensityError(x);
    return label;
}

/// Conditional risk of the Bayes classifier under 0/1 loss: 1 - max posterior.
inline double conditional_risk(const SyntheticSetup& s, double x) {
    double best = 0.0, total = 0.0;
    for (const auto& c : s.id_components) {
        const double d = c.weight * norm_pdf(x, c.mean, c.variance);
        total += d;
        if (d > best) best = d;
    }
    if (!(total > 0.0)) throw ZeroDensityError(x);
    return 1.0 - best / total;
}

/// p_ood(x) / p_id(x), with the +inf sentinel where the ID density vanishes.
inline double likelihood_ratio(const SyntheticSetup& s, double x) {
    const double pi_x = pdf_id(s, x);
    const double po_x = pdf_ood(s, x);
    if (pi_x <= 0.0) return kInf;
    return po_x / pi_x;
}

struct LabeledSample {
    double x = 0.0;
    int label = kOutlierLabel;  // 1..K for ID, kOutlierLabel for OOD

    bool is_outlier() const { return label == kOutlierLabel; }
};

/**
 * Deterministic mixture sampling: sample i depends only on (seed, i).
 * Substream draw order: outlier test, component/position uniforms.
 */
inline std::vector<LabeledSample> sample(const SyntheticSetup& s, std::size_t n,
                                         std::uint64_t seed) {
    s.validate();
    std::vector<LabeledSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        SplitRng rng = SplitRng::substream(seed, i);
        if (rng.next_unit() < s.pi) {
            out[i].label = kOutlierLabel;
            out[i].x = s.ood.mean + std::sqrt(s.ood.variance) * rng.next_normal();
        } else {
            const double u = rng.next_unit();
            double acc = 0.0;
            int k = s.num_labels() - 1;
            for (int y = 0; y < s.num_labels(); ++y) {
                acc += s.id_components[static_cast<std::size_t>(y)].weight;
                if (u < acc) {
                    k = y;
                    break;
                }
            }
            const auto& c = s.id_components[static_cast<std::size_t>(k)];
            out[i].label = k + 1;
            out[i].x = c.mean + std::sqrt(c.variance) * rng.next_normal();
        }
    }
    return out;
}

// --- JSON setup files ------------------------------------------------------
//
// {"id_components":[{"weight","mean","variance"},...],
//  "ood":{"mean","variance"}, "pi":0.25,
//  "costs":{"eps1","eps2","eps3"}, "param":"variance"}
//
// param selects how the spread numbers are read: "variance" (default) or
// "stddev" (squared on load).

inline SyntheticSetup setup_from_json(const nlohmann::json& j) {
    SyntheticSetup s;
    const std::string param = j.value("param", std::string("variance"));
    if (param != "variance" && param != "stddev")
        throw SetupError("setup: param must be \"variance\" or \"stddev\"");
    const bool squared = param == "stddev";
    auto spread = [&](double v) { return squared ? v * v : v; };

    if (!j.contains("id_components")) throw SetupError("setup: missing id_components");
    for (const auto& c : j.at("id_components")) {
        GaussComponent g;
        g.weight = c.at("weight").get<double>();
        g.mean = c.at("mean").get<double>();
        g.variance = spread(c.at("variance").get<double>());
        s.id_components.push_back(g);
    }
    const auto& o = j.at("ood");
    s.ood = GaussComponent{1.0, o.at("mean").get<double>(), spread(o.at("variance").get<double>())};
    s.pi = j.at("pi").get<double>();
    if (j.contains("costs")) {
        const auto& c = j.at("costs");
        s.costs.reject_id = c.at("eps1").get<double>();
        s.costs.accept_ood = c.at("eps2").get<double>();
        s.costs.reject_ood = c.at("eps3").get<double>();
    }
    s.validate();
    return s;
}

inline SyntheticSetup load_setup(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SetupError("setup: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SetupError("setup: " + path + ": " + e.what());
    }
    return setup_from_json(j);
}

/// The default benchmark world: three unit-variance ID classes at -1, 1, 3
/// (weights 0.3/0.3/0.4) and a tight outlier component on the class-2/3
/// decision boundary, with a 25% outlier prior.
inline SyntheticSetup default_setup() {
    SyntheticSetup s;
    s.id_components = {{0.3, -1.0, 1.0}, {0.3, 1.0, 1.0}, {0.4, 3.0, 1.0}};
    s.ood = {1.0, 2.0, 0.2};
    s.pi = 0.25;
    s.costs = Costs{0.5, 1.0, 0.0};
    return s;
}

}  // namespace rejopt
