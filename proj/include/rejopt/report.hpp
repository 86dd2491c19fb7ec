#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rejopt/format.hpp"
#include "rejopt/sweep.hpp"
#include "rejopt/tuning.hpp"

namespace rejopt {

using ordered_json = nlohmann::ordered_json;

/// FNV-1a over a byte string, rendered as 16 hex digits.
inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

/// Finite numbers stay numbers; anything else becomes an explicit string.
inline ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "undefined";
    return v > 0 ? "inf" : "-inf";
}

inline ordered_json rule_to_json(const SelectiveRule& rule) {
    ordered_json j;
    if (rule.alpha)
        j["alpha"] = json_number(*rule.alpha);
    else
        j["mu"] = json_number(rule.mu);
    j["lambda"] = json_number(rule.lambda);
    j["boundary_accept"] = rule.boundary_accept;
    return j;
}

/// One tuning outcome for the report: a winner or an "unable" verdict with
/// the attainable frontier.
struct TunedCell {
    std::optional<OperatingPoint> best;
    Frontier frontier;

    static TunedCell from(const TuneResult& r) { return {r.best, r.frontier}; }
};

inline ordered_json tuned_cell_to_json(const TunedCell& cell) {
    ordered_json j;
    if (cell.best) {
        const auto& op = *cell.best;
        j["status"] = "ok";
        j["selective_risk"] = json_number(op.selective_risk ? *op.selective_risk : kNaN);
        j["tpr"] = json_number(op.tpr);
        j["fpr"] = json_number(op.fpr);
        j["precision"] = op.precision ? json_number(*op.precision) : ordered_json("undefined");
        j["rule"] = rule_to_json(op.rule);
    } else {
        j["status"] = "unable";
        ordered_json f;
        auto put = [&](const char* key, const std::optional<double>& v) {
            if (v) f[key] = json_number(*v);
        };
        put("max_tpr_within_fpr", cell.frontier.max_tpr_within_fpr);
        put("min_fpr_within_tpr", cell.frontier.min_fpr_within_tpr);
        put("max_tpr_within_kappa", cell.frontier.max_tpr_within_kappa);
        put("max_kappa_within_tpr", cell.frontier.max_kappa_within_tpr);
        j["frontier"] = f;
    }
    return j;
}

struct MethodRow {
    std::string name;
    std::optional<TunedCell> tpr_fpr;
    std::optional<TunedCell> prec_recall;
    std::optional<double> auroc;
    std::optional<double> aupr;
    std::optional<double> oscr;
};

struct Report {
    int schema = 1;
    std::string command;
    ordered_json config;  // resolved flags; hashed for provenance
    std::vector<MethodRow> methods;
};

inline ordered_json report_to_json(const Report& rep) {
    ordered_json j;
    j["schema"] = rep.schema;
    j["command"] = rep.command;
    j["config"] = rep.config;
    j["config_hash"] = fnv1a_hex(rep.config.dump());
    ordered_json rows = ordered_json::array();
    for (const auto& m : rep.methods) {
        ordered_json r;
        r["name"] = m.name;
        if (m.tpr_fpr) r["tpr_fpr"] = tuned_cell_to_json(*m.tpr_fpr);
        if (m.prec_recall) r["prec_recall"] = tuned_cell_to_json(*m.prec_recall);
        if (m.auroc) r["auroc"] = json_number(*m.auroc);
        if (m.aupr) r["aupr"] = json_number(*m.aupr);
        if (m.oscr) r["oscr"] = json_number(*m.oscr);
        rows.push_back(r);
    }
    j["methods"] = rows;

    // ranking by selective risk under the TPR-FPR targets, unable rows last
    std::vector<std::pair<double, std::string>> ranked;
    std::vector<std::string> unable;
    for (const auto& m : rep.methods) {
        if (!m.tpr_fpr) continue;
        if (m.tpr_fpr->best && m.tpr_fpr->best->selective_risk)
            ranked.emplace_back(*m.tpr_fpr->best->selective_risk, m.name);
        else
            unable.push_back(m.name);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    ordered_json rank = ordered_json::array();
    for (const auto& [risk, name] : ranked) rank.push_back(name);
    j["ranking"] = rank;
    j["unable"] = unable;
    return j;
}

inline std::string cell_text(const std::optional<TunedCell>& cell) {
    if (!cell) return "-";
    if (!cell->best) return "unable";
    return format_fixed(cell->best->selective_risk ? *cell->best->selective_risk : kNaN, 3);
}

inline std::string metric_text(const std::optional<double>& v) {
    return v ? format_fixed(*v, 3) : std::string("-");
}

inline std::string rule_text(const SelectiveRule& rule) {
    std::string out;
    if (rule.alpha)
        out = "alpha=" + format_fixed(*rule.alpha, 4);
    else
        out = "mu=" + (std::isinf(rule.mu) ? std::string("inf") : format_fixed(rule.mu, 4));
    out += " lambda=" + format_fixed(rule.lambda, 6);
    return out;
}

/// Aligned text table plus the selective-risk ranking line.
inline std::string report_to_text(const Report& rep) {
    std::string out;
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    out += pad("method", 10) + pad("risk@tpr-fpr", 14) + pad("risk@prec-recall", 18) +
           pad("auroc", 8) + pad("aupr", 8) + pad("oscr", 8) + "rule\n";
    for (const auto& m : rep.methods) {
        std::string rule = "-";
        if (m.tpr_fpr && m.tpr_fpr->best)
            rule = rule_text(m.tpr_fpr->best->rule);
        else if (m.prec_recall && m.prec_recall->best)
            rule = rule_text(m.prec_recall->best->rule);
        out += pad(m.name, 10) + pad(cell_text(m.tpr_fpr), 14) +
               pad(cell_text(m.prec_recall), 18) + pad(metric_text(m.auroc), 8) +
               pad(metric_text(m.aupr), 8) + pad(metric_text(m.oscr), 8) + rule + "\n";
    }
    const ordered_json j = report_to_json(rep);
    out += "ranking by selective risk: ";
    bool first = true;
    for (const auto& name : j["ranking"]) {
        if (!first) out += " < ";
        out += name.get<std::string>();
        first = false;
    }
    if (!j["unable"].empty()) {
        out += first ? "(none feasible)" : "";
        out += "; unable: ";
        first = true;
        for (const auto& name : j["unable"]) {
            if (!first) out += ", ";
            out += name.get<std::string>();
            first = false;
        }
    }
    out += "\nconfig_hash: " + j["config_hash"].get<std::string>() + "\n";
    return out;
}

}  // namespace rejopt
