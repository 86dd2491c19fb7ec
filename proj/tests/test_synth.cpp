#include <catch_amalgamated.hpp>

#include <cstring>

#include "rejopt/quadrature.hpp"
#include "rejopt/synth.hpp"

using namespace rejopt;

namespace {

// The benchmark world as printed in the write-up that motivated it, with the
// outlier component on the class-3 mode. Several hand-derived values below
// are pinned to this variant; the shipped default uses ood mean 2.
SyntheticSetup printed_setup() {
    SyntheticSetup s = default_setup();
    s.ood.mean = 3.0;
    return s;
}

}  // namespace

TEST_CASE("pdf_id matches hand-summed Gaussian evaluations") {
    const auto s = printed_setup();
    CHECK(pdf_id(s, -1.0) == Catch::Approx(0.135934).margin(1e-5));

    SyntheticSetup single;
    single.id_components = {{1.0, 0.0, 1.0}};
    single.ood = {1.0, 0.0, 1.0};
    single.pi = 0.0;
    CHECK(pdf_id(single, 0.0) == Catch::Approx(0.3989423).margin(1e-6));

    CHECK(pdf_id(s, -200.0) == 0.0);
    CHECK(pdf_id(s, 200.0) == 0.0);
}

TEST_CASE("bayes classifier picks the posterior mode, ties to smaller label") {
    const auto s = printed_setup();
    CHECK(bayes_classifier(s, 5.0) == 3);
    CHECK(bayes_classifier(s, -4.0) == 1);
    // exact tie between classes 1 and 2 at the midpoint of their means
    CHECK(bayes_classifier(s, 0.0) == 1);
    CHECK_THROWS_AS(bayes_classifier(s, 1e6), ZeroDensityError);
}

TEST_CASE("conditional risk equals one minus the posterior mode") {
    const auto s = printed_setup();
    CHECK(conditional_risk(s, 0.0) == Catch::Approx(0.50604).margin(5e-5));
    CHECK(conditional_risk(s, 5.0) < 0.01);

    SyntheticSetup single;
    single.id_components = {{1.0, 0.0, 1.0}};
    single.ood = {1.0, 3.0, 1.0};
    CHECK(conditional_risk(single, 1.2345) == 0.0);

    const int k = s.num_labels();
    for (double x = -8.0; x <= 10.0; x += 0.37) {
        const double r = conditional_risk(s, x);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0 - 1.0 / k + 1e-15);
        // mode consistency with the classifier
        const int y = bayes_classifier(s, x);
        const auto& c = s.id_components[static_cast<std::size_t>(y - 1)];
        const double post = c.weight * norm_pdf(x, c.mean, c.variance) / pdf_id(s, x);
        CHECK(r == Catch::Approx(1.0 - post).margin(1e-14));
    }
}

TEST_CASE("likelihood ratio and its sentinel") {
    const auto s = printed_setup();
    // N(3;3,0.2) peak over the ID density at 3
    CHECK(likelihood_ratio(s, 3.0) == Catch::Approx(5.0738).margin(2e-4));
    CHECK(std::isinf(likelihood_ratio(s, 200.0)));

    SyntheticSetup same;
    same.id_components = {{1.0, 0.7, 1.3}};
    same.ood = {1.0, 0.7, 1.3};
    for (double x = -4.0; x <= 4.0; x += 0.61) CHECK(likelihood_ratio(same, x) == 1.0);
}

TEST_CASE("likelihood ratio is invariant to a common density rescale") {
    const auto s = printed_setup();
    const double scale = 7.3;
    auto scaled = s.id_components;
    for (auto& c : scaled) c.weight *= scale;
    for (double x = -6.0; x <= 8.0; x += 0.53) {
        const double plain = likelihood_ratio(s, x);
        const double rescaled = scale * pdf_ood(s, x) / mixture_pdf(scaled, x);
        CHECK(rescaled == Catch::Approx(plain).epsilon(1e-12));
    }
}

TEST_CASE("sampling: determinism, prior, edge cases") {
    const auto s = default_setup();
    CHECK(sample(s, 0, 1).empty());

    SyntheticSetup no_ood = s;
    no_ood.pi = 0.0;
    for (const auto& pt : sample(no_ood, 5000, 7)) CHECK_FALSE(pt.is_outlier());

    const auto a = sample(s, 100000, 42);
    const auto b = sample(s, 100000, 42);
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(LabeledSample)) == 0);

    std::size_t ood = 0;
    for (const auto& pt : a) ood += pt.is_outlier();
    CHECK(std::fabs(static_cast<double>(ood) / a.size() - 0.25) < 0.01);

    const auto c = sample(s, 1000, 43);
    bool differs = false;
    for (std::size_t i = 0; i < c.size(); ++i) differs = differs || c[i].x != a[i].x;
    CHECK(differs);
}

TEST_CASE("sampled subsequences are independent of order (splittable streams)") {
    const auto s = default_setup();
    const auto head = sample(s, 10, 9);
    const auto full = sample(s, 1000, 9);
    for (std::size_t i = 0; i < head.size(); ++i) {
        CHECK(head[i].x == full[i].x);
        CHECK(head[i].label == full[i].label);
    }
}

TEST_CASE("ID mixture integrates to one over the quadrature bracket") {
    for (const auto& s : {default_setup(), printed_setup()}) {
        const double total = quad::integrate([&](double x) { return pdf_id(s, x); });
        CHECK(total == Catch::Approx(1.0).margin(1e-6));
        const double ood_total = quad::integrate([&](double x) { return pdf_ood(s, x); });
        CHECK(ood_total == Catch::Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("setup validation rejects malformed worlds") {
    SyntheticSetup s = default_setup();
    CHECK_NOTHROW(s.validate());

    SyntheticSetup bad = s;
    bad.id_components[0].weight = 0.4;
    CHECK_THROWS_AS(bad.validate(), SetupError);

    bad = s;
    bad.pi = 1.0;
    CHECK_THROWS_AS(bad.validate(), SetupError);

    bad = s;
    bad.ood.variance = 0.0;
    CHECK_THROWS_AS(bad.validate(), SetupError);

    bad = s;
    bad.costs.accept_ood = 0.0;  // eps2 must exceed eps3
    bad.costs.reject_ood = 0.0;
    CHECK_THROWS_AS(bad.validate(), SetupError);
}

TEST_CASE("setup JSON round trip and the stddev switch") {
    const char* doc = R"({
        "id_components": [
            {"weight": 0.5, "mean": -1.0, "variance": 2.0},
            {"weight": 0.5, "mean": 2.0, "variance": 0.5}
        ],
        "ood": {"mean": 1.0, "variance": 0.3},
        "pi": 0.1,
        "costs": {"eps1": 0.4, "eps2": 2.0, "eps3": 0.5},
        "param": "variance"
    })";
    const auto s = setup_from_json(nlohmann::json::parse(doc));
    CHECK(s.id_components.size() == 2);
    CHECK(s.id_components[0].variance == 2.0);
    CHECK(s.ood.variance == 0.3);
    CHECK(s.pi == 0.1);
    CHECK(s.costs.reject_id == 0.4);

    auto j = nlohmann::json::parse(doc);
    j["param"] = "stddev";
    const auto t = setup_from_json(j);
    CHECK(t.id_components[0].variance == 4.0);
    CHECK(t.ood.variance == Catch::Approx(0.09).epsilon(1e-12));

    j["param"] = "precision";
    CHECK_THROWS_AS(setup_from_json(j), SetupError);
}
