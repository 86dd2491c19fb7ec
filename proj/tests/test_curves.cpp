#include <catch_amalgamated.hpp>

#include <sstream>

#include "helpers.hpp"
#include "rejopt/curves.hpp"

using namespace rejopt;

namespace {

ScoredDataset four_samples() {
    ScoredDataset ds;
    ds.samples = {{0.1, 0.0, false, 0.0},
                  {0.2, 0.0, true, 0.0},
                  {0.3, 0.0, false, 1.0},
                  {0.4, 0.0, true, 0.0}};
    return ds;
}

}  // namespace

TEST_CASE("ROC points of the four-sample dataset") {
    const auto roc = roc_curve(four_samples(), ScoreFamily::single_r());
    REQUIRE(roc.points.size() == 5);
    const double want[5][2] = {{0.0, 0.0}, {0.0, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {1.0, 1.0}};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(roc.points[i].x == want[i][0]);
        CHECK(roc.points[i].y == want[i][1]);
    }
}

TEST_CASE("perfect and constant separators") {
    ScoredDataset perfect;
    perfect.samples = {{0.0, 0.0, false, 0.0},
                       {0.1, 0.0, false, 0.0},
                       {0.9, 0.0, true, 0.0},
                       {1.0, 0.0, true, 0.0}};
    const auto roc = roc_curve(perfect, ScoreFamily::single_r());
    bool has_corner = false;
    for (const auto& p : roc.points) has_corner = has_corner || (p.x == 0.0 && p.y == 1.0);
    CHECK(has_corner);
    CHECK(auroc(roc) == 1.0);

    ScoredDataset flat;
    flat.samples = {{0.5, 0.0, false, 0.0}, {0.5, 0.0, true, 0.0}, {0.5, 0.0, false, 1.0}};
    const auto diag = roc_curve(flat, ScoreFamily::single_r());
    REQUIRE(diag.points.size() == 2);
    CHECK(diag.points[0].x == 0.0);
    CHECK(diag.points[0].y == 0.0);
    CHECK(diag.points[1].x == 1.0);
    CHECK(diag.points[1].y == 1.0);
    CHECK(auroc(diag) == 0.5);
}

TEST_CASE("trapezoidal AUROC equals the rank statistic") {
    for (std::uint64_t seed = 40; seed < 70; ++seed) {
        const std::size_t n = 2 + static_cast<std::size_t>(
                                      SplitRng::substream(seed, 5).next_unit() * 498);
        auto ds = testutil::random_dataset(seed, n, seed % 3 == 0);
        if (ds.num_ood() == 0) ds.samples[1].is_ood = true, ds.samples[1].loss = 0.0;
        const double trap = auroc(roc_curve(ds, ScoreFamily::single_r()));
        const double rank = testutil::rank_sum_auroc(ds);
        CHECK(std::fabs(trap - rank) <= 1e-12);
    }
}

TEST_CASE("negating the score mirrors the AUROC") {
    for (std::uint64_t seed = 200; seed < 210; ++seed) {
        auto ds = testutil::random_dataset(seed, 120, seed % 2 == 0);
        if (ds.num_ood() == 0) ds.samples[0].is_ood = true, ds.samples[0].loss = 0.0;
        auto flipped = ds;
        for (auto& s : flipped.samples) s.score_r = -s.score_r;
        const double a = auroc(roc_curve(ds, ScoreFamily::single_r()));
        const double b = auroc(roc_curve(flipped, ScoreFamily::single_r()));
        CHECK(std::fabs(a + b - 1.0) <= 1e-12);
    }
}

TEST_CASE("ROC requires OOD rows") {
    ScoredDataset ds;
    ds.samples = {{0.1, 0.0, false, 0.0}, {0.4, 0.0, false, 1.0}};
    CHECK_THROWS_AS(roc_curve(ds, ScoreFamily::single_r()), DatasetError);
}

TEST_CASE("precision-recall curve basics") {
    const auto ds = four_samples();
    SECTION("zero-coverage points are skipped") {
        const auto pr = pr_curve(ds, ScoreFamily::single_r(), 0.5);
        for (const auto& p : pr.points) CHECK(p.x > 0.0);
    }
    SECTION("pi = 0 pins precision at one") {
        const auto pr = pr_curve(ds, ScoreFamily::single_r(), 0.0);
        for (const auto& p : pr.points) CHECK(p.y == 1.0);
        CHECK(aupr(pr) >= 1.0 - 0.5 - 1e-12);  // first attainable recall is 1/2
        const auto dsg = testutil::random_dataset(97, 60, false, true);
        const auto prd = pr_curve(dsg, ScoreFamily::double_grid(8), 0.0, 11);
        CHECK(aupr(prd) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("curve values stay in the unit square") {
        for (std::uint64_t seed = 300; seed < 305; ++seed) {
            auto rds = testutil::random_dataset(seed, 140, true);
            const auto pr = pr_curve(rds, ScoreFamily::single_r(), rds.pi_for_precision());
            for (const auto& p : pr.points) {
                CHECK(p.y >= 0.0);
                CHECK(p.y <= 1.0);
                CHECK(p.x >= 0.0);
                CHECK(p.x <= 1.0);
            }
        }
    }
}

TEST_CASE("risk-coverage at relaxed FPR equals the unconstrained curve") {
    const auto ds = testutil::random_dataset(51, 160, true);
    const auto rc = rc_at_fpr(ds, ScoreFamily::single_r(), 1.0, 101);

    // independent construction from the operating points
    const auto pts = sweep_single_score(ds, ScoreSelector::R);
    for (const auto& gp : rc.series.points) {
        double best = kInf;
        for (const auto& p : pts)
            if (p.selective_risk && p.tpr >= gp.x) best = std::min(best, *p.selective_risk);
        CHECK(gp.y == best);
    }
    REQUIRE(rc.phi_max.has_value());
    CHECK(*rc.phi_max == 1.0);
}

TEST_CASE("risk-coverage curve is empty when nothing is feasible") {
    ScoredDataset ds;
    ds.samples = {{0.3, 0.0, false, 1.0}, {0.1, 0.0, true, 0.0}};
    // any acceptance of the ID row also accepts the OOD row first
    const auto rc = rc_at_fpr(ds, ScoreFamily::single_r(), 0.0, 11);
    CHECK(rc.series.points.empty());
    CHECK_FALSE(rc.phi_max.has_value());
}

TEST_CASE("OSCR of an error-free perfectly separated dataset is one") {
    ScoredDataset ds;
    ds.samples = {{0.0, 0.0, false, 0.0},
                  {0.2, 0.0, false, 0.0},
                  {0.8, 0.0, true, 0.0},
                  {0.9, 0.0, true, 0.0}};
    CHECK(oscr(ds, ScoreSelector::R) == 1.0);
}

TEST_CASE("plain and coverage-weighted CCR conventions") {
    const auto ds = four_samples();
    const auto plain = ccr_fpr_curve(ds, ScoreFamily::single_r(), CcrWeighting::Plain);
    REQUIRE_FALSE(plain.points.empty());
    CHECK(plain.points.front().x == 0.0);
    CHECK(plain.points.front().y == 0.0);  // empty acceptance pinned at (0,0)
    // accepting just the first (correct) ID row: plain CCR is 1
    CHECK(plain.points[1].y == 1.0);

    const auto weighted =
        ccr_fpr_curve(ds, ScoreFamily::single_r(), CcrWeighting::CoverageWeighted);
    CHECK(weighted.points[1].y == 0.5);  // one of two ID rows accepted and correct
}

TEST_CASE("double-score curves dominate the single-score curves on the grid") {
    const auto ds = testutil::random_dataset(61, 250, false, true);
    const int grid_size = 51;
    const auto roc_d = roc_curve(ds, ScoreFamily::double_grid(24), grid_size);
    const auto pr_d = pr_curve(ds, ScoreFamily::double_grid(24), ds.pi_for_precision(),
                               grid_size);
    for (const auto fam : {ScoreFamily::single_r(), ScoreFamily::single_g()}) {
        const auto roc_s = roc_curve(ds, fam, grid_size);
        // evaluate the single-score attainable maximum on the same grid
        const auto pts =
            sweep_single_score(ds, fam.kind == ScoreFamily::Kind::SingleR ? ScoreSelector::R
                                                                          : ScoreSelector::G);
        for (const auto& gp : roc_d.points) {
            double best = 0.0;
            for (const auto& p : pts)
                if (p.fpr <= gp.x) best = std::max(best, p.tpr);
            CHECK(gp.y >= best - 1e-12);
        }
        for (const auto& gp : pr_d.points) {
            double best = -1.0;
            for (const auto& p : pts)
                if (p.tpr >= gp.x && p.precision) best = std::max(best, *p.precision);
            if (best >= 0.0) CHECK(gp.y >= best - 1e-12);
        }
        (void)roc_s;
    }
}

TEST_CASE("curve CSV export carries kind, constraints and points") {
    const auto ds = four_samples();
    const auto rc = rc_at_fpr(ds, ScoreFamily::single_r(), 0.5, 5);
    std::ostringstream out;
    write_curve_csv(out, rc.series);
    const std::string text = out.str();
    CHECK(text.find("# kind=rc_at_fpr") == 0);
    CHECK(text.find("rho_max=0.5") != std::string::npos);
    CHECK(text.find("\nx,y\n") != std::string::npos);

    std::ostringstream out2;
    write_curve_csv(out2, rc.series);
    CHECK(out.str() == out2.str());
}
