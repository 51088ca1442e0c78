#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "indefsl/oracle.hpp"
#include "indefsl/presets.hpp"
#include "indefsl/spectral_count.hpp"

using namespace indefsl;

namespace {
long oracle_count_in(const std::vector<double>& eigs, double a, double b) {
    long n = 0;
    for (double ev : eigs) n += (ev > a && ev < b);
    return n;
}
}  // namespace

TEST_CASE("no spectrum below a constant barrier", "[spectral-count]") {
    const IndefiniteProblem prob = build_problem(presets::constant_doc(1.0));
    const auto res = count_below(prob, Side::plus, 0.5);
    CHECK(res.count == 0);
    CHECK(res.exact);
    CHECK(count_in_interval_raw(prob, Side::plus, 0.0, 1.0).count == 0);
}

TEST_CASE("half-line counts agree with the finite-difference oracle", "[spectral-count]") {
    const IndefiniteProblem k2 = build_problem(presets::sech2_doc(2));
    const auto below = count_below(k2, Side::plus, 8.99);
    REQUIRE(below.exact);
    const auto oracle2 = oracle_halfline_eigenvalues(k2, Side::plus, 30.0, 4000);
    CHECK(below.count == oracle_count_in(oracle2, -1e300, 8.99));
    CHECK(below.count == 1);  // the odd bound state at 8

    const IndefiniteProblem k3 = build_problem(presets::sech2_doc(3));
    const auto in_gap = count_in_interval_raw(k3, Side::plus, 4.0, 16.0);
    REQUIRE(in_gap.exact);
    const auto oracle3 = oracle_halfline_eigenvalues(k3, Side::plus, 30.0, 4000);
    CHECK(in_gap.count == oracle_count_in(oracle3, 4.0, 16.0));
}

TEST_CASE("reflected counting reuses the left half line", "[spectral-count]") {
    const IndefiniteProblem prob = build_problem(presets::sech2_doc(2));
    const auto neg = count_in_interval(prob, {Side::minus, -1}, -9.0, -3.0);
    const auto pos = count_in_interval(prob, {Side::plus, +1}, 3.0, 9.0);
    REQUIRE(neg.exact);
    REQUIRE(pos.exact);
    CHECK(neg.count == pos.count);
    CHECK(pos.count == 1);
}

TEST_CASE("count_below flags the accumulation regime as a lower bound", "[spectral-count]") {
    const IndefiniteProblem prob = build_problem(presets::kneser_supercritical_doc());
    const auto res = count_below(prob, Side::plus, 1.0 - 1e-4, {}, 16);
    CHECK_FALSE(res.exact);
    CHECK(res.count >= 16);
}

TEST_CASE("the literal inverse-square tail resolves to a small finite count", "[spectral-count]") {
    // x^2 (q - q_inf) -> -0.5 < -1/4 accumulates only logarithmically: at any
    // resolvable distance below the edge the count is tiny and stable
    const IndefiniteProblem prob = build_problem(presets::rational_tail_doc(1.0, -0.5, 1.0));
    const auto res = count_below(prob, Side::plus, 1.0 - 1e-4);
    CHECK(res.exact);
    CHECK(res.count <= 2);
}

TEST_CASE("localization encloses the Dirichlet eigenvalue", "[spectral-count]") {
    const IndefiniteProblem prob = build_problem(presets::sech2_doc(2));
    WeylSolver solver(prob);
    const auto none = locate_eigenvalues(solver, {Side::plus, +1}, 0.1, 0.9);
    CHECK(none.empty());

    const auto found = locate_eigenvalues(solver, {Side::plus, +1}, 3.0, 8.99, 1e-7);
    REQUIRE(found.size() == 1);
    CHECK(found[0].radius() <= 1e-7);
    CHECK(found[0].lo <= 8.0);
    CHECK(found[0].hi >= 8.0 - 1e-6);

    const auto mirrored = locate_eigenvalues(solver, {Side::minus, -1}, -8.99, -3.0, 1e-7);
    REQUIRE(mirrored.size() == 1);
    CHECK_THAT(mirrored[0].mid(), Catch::Matchers::WithinAbs(-8.0, 1e-5));
}

TEST_CASE("count_below is a nondecreasing staircase in lambda", "[spectral-count]") {
    const IndefiniteProblem prob = build_problem(presets::sech2_doc(4));
    long prev = -1;
    for (double lam = 1.0; lam < 24.9; lam += 1.4) {
        const auto res = count_below(prob, Side::plus, lam);
        REQUIRE(res.exact);
        REQUIRE(res.count >= prev);
        prev = res.count;
    }
}

TEST_CASE("count preconditions reject spectrum-adjacent probes", "[spectral-count]") {
    const IndefiniteProblem prob = build_problem(presets::constant_doc(1.0));
    CHECK_THROWS_AS(count_below(prob, Side::plus, 1.0), EssentialSpectrumProximity);
    CHECK_THROWS_AS(count_below(prob, Side::plus, 3.0), EssentialSpectrumProximity);
}
