#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

#include "rejopt/curves.hpp"
#include "rejopt/dataset.hpp"
#include "rejopt/lp.hpp"
#include "rejopt/report.hpp"
#include "rejopt/svg.hpp"
#include "rejopt/synth.hpp"
#include "rejopt/synth_bench.hpp"
#include "rejopt/tuning.hpp"

namespace fs = std::filesystem;
using namespace rejopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;       // usage / IO / malformed input
constexpr int kExitInfeasible = 2;  // nothing attainable under the targets

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

fs::path ensure_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

struct SynthArgs {
    std::string setup_path;
    std::string out_dir = "rejopt_out";
    std::uint64_t n = 200000;
    std::uint64_t seed = 1;
    int d = 360;
    double phi_min = 0.7, rho_max = 0.2, kappa_min = 0.9;
};

int cmd_synth(const SynthArgs& a) {
    if (a.n == 0) {
        std::cerr << "synth: empty dataset (n must be positive)\n";
        return kExitError;
    }
    const SyntheticSetup setup =
        a.setup_path.empty() ? default_setup() : load_setup(a.setup_path);
    setup.validate();

    const ScoredDataset ds = make_scored_dataset(setup, a.n, a.seed);
    TuningTargets tf{a.phi_min, a.rho_max, std::nullopt};
    TuningTargets pr{a.phi_min, std::nullopt, a.kappa_min};

    Report rep;
    rep.command = "synth";
    rep.config = {{"setup", a.setup_path.empty() ? "<default>" : a.setup_path},
                  {"n", a.n},
                  {"seed", a.seed},
                  {"d", a.d},
                  {"phi_min", a.phi_min},
                  {"rho_max", a.rho_max},
                  {"kappa_min", a.kappa_min},
                  {"pi", setup.pi}};
    rep.methods = run_benchmark(ds, tf, pr, a.d);

    const fs::path out = ensure_dir(a.out_dir);
    write_file(out / "report.json", report_to_json(rep).dump(2) + "\n");
    const std::string text = report_to_text(rep);
    write_file(out / "report.txt", text);
    {
        std::ofstream scores(out / "scores.csv", std::ios::binary);
        if (!scores) throw std::runtime_error("cannot write scores.csv");
        write_score_csv(scores, ds);
    }
    std::cout << text;
    std::cout << "wrote " << (out / "report.json").string() << ", report.txt, scores.csv\n";
    return kExitOk;
}

struct TuneArgs {
    std::string scores_path;
    std::string mode = "tpr-fpr";
    std::string out_dir;
    double phi_min = 0.7;
    std::optional<double> rho_max, kappa_min, pi;
    int d = 360;
};

int cmd_tune(const TuneArgs& a) {
    ScoredDataset ds = load_score_csv(a.scores_path);
    if (a.pi) ds.pi_override = *a.pi;
    const TuneMode mode = a.mode == "tpr-fpr" ? TuneMode::TprFpr : TuneMode::PrecRecall;
    TuningTargets targets;
    targets.phi_min = a.phi_min;
    targets.rho_max = a.rho_max;
    targets.kappa_min = a.kappa_min;
    targets.validate(mode);
    const double pi = ds.pi_for_precision();

    Report rep;
    rep.command = "tune";
    rep.config = {{"scores", a.scores_path}, {"mode", a.mode},     {"phi_min", a.phi_min},
                  {"rho_max", a.rho_max ? ordered_json(*a.rho_max) : ordered_json(nullptr)},
                  {"kappa_min", a.kappa_min ? ordered_json(*a.kappa_min) : ordered_json(nullptr)},
                  {"pi", pi},             {"d", a.d}};

    auto tune_one = [&](const ScoreFamily& fam) {
        return mode == TuneMode::TprFpr ? tune_tpr_fpr(ds, fam, targets)
                                        : tune_prec_recall(ds, fam, targets, pi);
    };
    std::vector<std::pair<std::string, ScoreFamily>> families;
    families.emplace_back("score_r", ScoreFamily::single_r());
    if (ds.has_score_g) {
        families.emplace_back("score_g", ScoreFamily::single_g());
        families.emplace_back("double", ScoreFamily::double_grid(a.d));
    }
    bool any_feasible = false;
    for (const auto& [name, fam] : families) {
        MethodRow row;
        row.name = name;
        TunedCell cell = TunedCell::from(tune_one(fam));
        any_feasible = any_feasible || cell.best.has_value();
        if (mode == TuneMode::TprFpr)
            row.tpr_fpr = std::move(cell);
        else
            row.prec_recall = std::move(cell);
        rep.methods.push_back(std::move(row));
    }

    std::string text = report_to_text(rep);
    if (!ds.has_score_g) text += "note: score_g column absent; double-score tuning skipped\n";
    std::cout << text;
    if (!a.out_dir.empty()) {
        const fs::path out = ensure_dir(a.out_dir);
        write_file(out / "report.json", report_to_json(rep).dump(2) + "\n");
        write_file(out / "report.txt", text);
    }
    return any_feasible ? kExitOk : kExitInfeasible;
}

struct CurvesArgs {
    std::string scores_path;
    std::string out_dir = "rejopt_out";
    double rho_max = 0.2;
    std::optional<double> pi;
    int d = 360;
    int grid = 201;
};

int cmd_curves(const CurvesArgs& a) {
    ScoredDataset ds = load_score_csv(a.scores_path);
    if (a.pi) ds.pi_override = *a.pi;
    if (ds.num_ood() == 0) {
        std::cerr << "curves: score file has no OOD rows; ROC and CCR-FPR curves "
                     "against FPR are undefined\n";
        return kExitError;
    }
    const double pi = ds.pi_for_precision();
    const fs::path out = ensure_dir(a.out_dir);

    std::vector<std::pair<std::string, ScoreFamily>> families;
    families.emplace_back("score_r", ScoreFamily::single_r());
    if (ds.has_score_g) {
        families.emplace_back("score_g", ScoreFamily::single_g());
        families.emplace_back("double", ScoreFamily::double_grid(a.d));
    }

    struct Drawn {
        std::string label;
        CurveSeries curve;
    };
    std::vector<Drawn> rocs, prs, rcs, ccrs;
    for (const auto& [name, fam] : families) {
        rocs.push_back({name, roc_curve(ds, fam, a.grid)});
        prs.push_back({name, pr_curve(ds, fam, pi, a.grid)});
        auto rc = rc_at_fpr(ds, fam, a.rho_max, a.grid);
        if (rc.phi_max)
            rc.series.meta += " phi_max=" + format_double(*rc.phi_max);
        rcs.push_back({name, std::move(rc.series)});
        ccrs.push_back({name, ccr_fpr_curve(ds, fam)});
    }

    auto emit = [&](const std::vector<Drawn>& group, const std::string& stem,
                    const std::string& title, const std::string& xl, const std::string& yl) {
        std::vector<svg::Series> overlay;
        for (const auto& d : group) {
            std::ostringstream csv;
            write_curve_csv(csv, d.curve);
            write_file(out / (stem + "_" + d.label + ".csv"), csv.str());
            overlay.push_back({d.label, &d.curve});
        }
        std::ostringstream s;
        svg::write_plot(s, title, xl, yl, overlay);
        write_file(out / (stem + ".svg"), s.str());
    };
    emit(rocs, "roc", "ROC", "FPR", "TPR");
    emit(prs, "pr", "Precision-Recall", "recall", "precision");
    emit(rcs, "rc_at_fpr", "Risk-Coverage at FPR<=" + format_double(a.rho_max), "coverage",
         "selective risk");
    emit(ccrs, "ccr_fpr", "CCR vs FPR", "FPR", "CCR");
    for (const auto& d : rcs)
        std::cout << "rc_at_fpr[" << d.label << "]: " << d.curve.meta << "\n";
    std::cout << "wrote curve CSV/SVG files under " << out.string() << "\n";
    return kExitOk;
}

struct LpArgs {
    std::string instance_path;
    std::string out_dir = "rejopt_out";
    double phi_min = 1.0;
    double rho_max = 1.0;
};

int cmd_lp(const LpArgs& a) {
    std::ifstream in(a.instance_path);
    if (!in) {
        std::cerr << "lp: cannot open " << a.instance_path << "\n";
        return kExitError;
    }
    const LpInstance inst = read_lp_csv(in, a.instance_path, a.phi_min, a.rho_max);
    const LpSolution sol = solve(inst);
    const fs::path out = ensure_dir(a.out_dir);
    if (sol.status == LpStatus::Infeasible) {
        std::cout << "status: infeasible\n";
        write_file(out / "structure.json",
                   ordered_json{{"status", "infeasible"},
                                {"phi_min", a.phi_min},
                                {"rho_max", a.rho_max}}
                           .dump(2) +
                       "\n");
        return kExitInfeasible;
    }
    const StructureReport st = verify_band_structure(inst, sol);
    {
        std::ostringstream csv;
        write_lp_solution_csv(csv, sol);
        write_file(out / "solution.csv", csv.str());
    }
    ordered_json j{{"status", "optimal"},
                   {"objective", sol.objective},
                   {"lambda", st.lambda},
                   {"mu", st.mu},
                   {"fractional_count", st.fractional_count},
                   {"fractional_ratio_values", st.fractional_ratio_values},
                   {"structure_consistent", st.consistent},
                   {"offending", st.offending},
                   {"id_scale", sol.id_scale},
                   {"ood_scale", sol.ood_scale}};
    write_file(out / "structure.json", j.dump(2) + "\n");
    std::cout << "status: optimal objective: " << format_double(sol.objective)
              << " fractional: " << st.fractional_count
              << (st.consistent ? " structure: consistent" : " structure: VIOLATION") << "\n";
    return st.consistent ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reject-option strategies for classification under OOD contamination"};
    app.require_subcommand(1);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "reproduce the synthetic benchmark table");
    synth->add_option("--setup", sa.setup_path, "setup JSON (defaults to the built-in world)");
    synth->add_option("--n", sa.n, "sample count")->capture_default_str();
    synth->add_option("--seed", sa.seed, "RNG seed")->capture_default_str();
    synth->add_option("--d", sa.d, "angular grid size")->capture_default_str();
    synth->add_option("--phi-min", sa.phi_min, "TPR/recall floor")->capture_default_str();
    synth->add_option("--rho-max", sa.rho_max, "FPR cap")->capture_default_str();
    synth->add_option("--kappa-min", sa.kappa_min, "precision floor")->capture_default_str();
    synth->add_option("--out", sa.out_dir, "output directory")->capture_default_str();

    TuneArgs ta;
    auto* tune = app.add_subcommand("tune", "constrained post-hoc tuning from a score file");
    tune->add_option("--scores", ta.scores_path, "score CSV")->required();
    tune->add_option("--mode", ta.mode, "tpr-fpr | prec-recall")
        ->check(CLI::IsMember({"tpr-fpr", "prec-recall"}))
        ->required();
    tune->add_option("--phi-min", ta.phi_min, "TPR/recall floor")->required();
    tune->add_option("--rho-max", ta.rho_max, "FPR cap (tpr-fpr mode)");
    tune->add_option("--kappa-min", ta.kappa_min, "precision floor (prec-recall mode)");
    tune->add_option("--pi", ta.pi, "OOD prior for precision (default: sample fraction)");
    tune->add_option("--d", ta.d, "angular grid size")->capture_default_str();
    tune->add_option("--out", ta.out_dir, "output directory (optional)");

    CurvesArgs ca;
    auto* curves = app.add_subcommand("curves", "emit ROC/PR/RC/CCR curves as CSV and SVG");
    curves->add_option("--scores", ca.scores_path, "score CSV")->required();
    curves->add_option("--rho-max", ca.rho_max, "FPR cap for the RC curve")
        ->capture_default_str();
    curves->add_option("--pi", ca.pi, "OOD prior for precision (default: sample fraction)");
    curves->add_option("--d", ca.d, "angular grid size")->capture_default_str();
    curves->add_option("--out", ca.out_dir, "output directory")->capture_default_str();

    LpArgs la;
    auto* lp = app.add_subcommand("lp", "solve the finite bounded TPR-FPR linear program");
    lp->add_option("--instance", la.instance_path, "instance CSV (p_id,p_ood,risk_mass)")
        ->required();
    lp->add_option("--phi-min", la.phi_min, "exact coverage target")->required();
    lp->add_option("--rho-max", la.rho_max, "FPR cap")->required();
    lp->add_option("--out", la.out_dir, "output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try {
        if (synth->parsed()) return cmd_synth(sa);
        if (tune->parsed()) return cmd_tune(ta);
        if (curves->parsed()) return cmd_curves(ca);
        if (lp->parsed()) return cmd_lp(la);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
