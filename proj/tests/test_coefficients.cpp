#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "indefsl/coefficients.hpp"
#include "indefsl/presets.hpp"

using namespace indefsl;
using nlohmann::json;

TEST_CASE("build_problem accepts the solvable hyperbolic-cosine example", "[coefficients]") {
    const IndefiniteProblem prob = build_problem(presets::sech2_doc(2));
    CHECK(prob.symmetric);
    CHECK(prob.c == 0.0);
    CHECK_THAT(prob.q(0.0), Catch::Matchers::WithinRel(3.0, 1e-15));  // 9 - 6
    CHECK_THAT(prob.q(50.0), Catch::Matchers::WithinAbs(9.0, 1e-12));
    CHECK(prob.r(1.0) == 1.0);
    CHECK(prob.r(-1.0) == -1.0);
    CHECK(prob.ess.lower_gap_top().value() == 9.0);
}

TEST_CASE("build_problem accepts constant coefficients with a constant tail", "[coefficients]") {
    const IndefiniteProblem prob = build_problem(presets::constant_doc(1.0));
    CHECK(prob.q(3.0) == 1.0);
    CHECK(prob.abs_r(-5.0) == 1.0);
}

TEST_CASE("a weight with no sign change is rejected", "[coefficients]") {
    json doc = presets::constant_doc(1.0);
    doc["r"] = {{"builtin", "constant"}, {"params", {{"value", 1.0}}}};
    doc["symmetric"] = false;
    CHECK_THROWS_AS(build_problem(doc), SignPatternViolation);
}

TEST_CASE("nonpositive p and broken declared symmetry are rejected", "[coefficients]") {
    json doc = presets::constant_doc(1.0);
    doc["p"] = {{"builtin", "constant"}, {"params", {{"value", -1.0}}}};
    CHECK_THROWS_AS(build_problem(doc), NonpositiveP);

    json doc2 = presets::constant_doc(1.0);
    doc2["q"] = {{"expr", "1 + exp(-(x-1)^2)"}};
    CHECK_THROWS_AS(build_problem(doc2), SymmetryDeclaredButViolated);
    doc2["symmetric"] = false;
    CHECK_NOTHROW(build_problem(doc2));
}

TEST_CASE("schema violations surface as parse errors", "[coefficients]") {
    CHECK_THROWS_AS(build_problem(json{{"r", 1}}), ParseError);
    json doc = presets::constant_doc(1.0);
    doc["ess_model"] = {{"variant", "constant_tail"}, {"q_inf", -2.0}};
    CHECK_THROWS_AS(build_problem(doc), ParseError);
    json doc2 = presets::constant_doc(1.0);
    doc2["q"] = {{"expr", "1 + bogus(x)"}};
    CHECK_THROWS_AS(build_problem(doc2), ParseError);
}

TEST_CASE("check_symmetry reports sampled defects", "[coefficients]") {
    const SymmetryReport even = check_symmetry(build_problem(presets::sech2_doc(2)), 2000);
    CHECK(even.p_defect == 0.0);
    CHECK(even.q_defect == 0.0);
    CHECK(even.r_defect == 0.0);
    CHECK(even.consistent);

    json doc = presets::constant_doc(1.0);
    doc["q"] = {{"expr", "1 + exp(-(x-1)^2)"}};
    doc["symmetric"] = false;
    const SymmetryReport bumped = check_symmetry(build_problem(doc), 2000);
    CHECK(bumped.q_defect > 0.1);
    CHECK(bumped.consistent);  // declared asymmetric, measured asymmetric

    const SymmetryReport per = check_symmetry(build_problem(presets::periodic_cos_doc()), 2000);
    CHECK(per.p_defect == 0.0);
    CHECK(per.q_defect <= 1e-12);
    CHECK(per.r_defect == 0.0);
    CHECK(per.consistent);
}

TEST_CASE("validation is deterministic and digests are stable", "[coefficients]") {
    const IndefiniteProblem p1 = build_problem(presets::sech2_doc(3));
    const IndefiniteProblem p2 = build_problem(presets::sech2_doc(3));
    CHECK(p1.digest() == p2.digest());
    const SymmetryReport r1 = check_symmetry(p1, 5000);
    const SymmetryReport r2 = check_symmetry(p2, 5000);
    CHECK(r1.p_defect == r2.p_defect);
    CHECK(r1.q_defect == r2.q_defect);
    CHECK(r1.r_defect == r2.r_defect);
    CHECK(p1.digest() != build_problem(presets::sech2_doc(4)).digest());
}

TEST_CASE("builtin closed forms match an independent evaluation", "[coefficients]") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-30.0, 30.0);
    const IndefiniteProblem sech = build_problem(presets::sech2_doc(2));
    const IndefiniteProblem rat = build_problem(presets::kneser_supercritical_doc());
    const IndefiniteProblem per = build_problem(presets::periodic_cos_doc());
    for (int i = 0; i < 10000; ++i) {
        const double x = d(rng);
        const double ch = std::cosh(x);
        REQUIRE_THAT(sech.q(x), Catch::Matchers::WithinRel(9.0 - 6.0 / (ch * ch), 1e-15));
        REQUIRE_THAT(rat.q(x),
                     Catch::Matchers::WithinRel(1.0 - 0.9 * std::pow(1.0 + x * x, -0.0625), 1e-15));
        REQUIRE_THAT(per.q(x),
                     Catch::Matchers::WithinRel(10.0 + 2.0 * std::cos(2.0 * pi * x), 1e-14));
    }
}
