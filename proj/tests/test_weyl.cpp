#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "indefsl/presets.hpp"
#include "indefsl/weyl.hpp"

using namespace indefsl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("constant-tail Weyl coefficients match the closed form", "[weyl]") {
    // p = 1, q = 1, |r| = 1: the square-integrable solution on the right is
    // exp(-sqrt(1-lambda) x), so m+(lambda) = -sqrt(1-lambda); mirrored on
    // the left, m-(lambda) = +sqrt(1-lambda)
    const IndefiniteProblem prob = build_problem(presets::constant_doc(1.0));
    WeylSolver solver(prob);
    for (double lam : {-4.0, -1.0, 0.0, 0.5, 0.9}) {
        const auto mp = solver.m_plus(lam);
        REQUIRE(mp.converged);
        CHECK_THAT(mp.scalar(), WithinAbs(-std::sqrt(1.0 - lam), 1e-8));
        const auto mm = solver.m_minus(lam);
        CHECK_THAT(mm.scalar(), WithinAbs(std::sqrt(1.0 - lam), 1e-8));
    }
    CHECK_THAT(solver.m_plus(0.0).scalar(), WithinAbs(-1.0, 1e-9));
    CHECK_THAT(solver.m_minus(0.0).scalar(), WithinAbs(1.0, 1e-9));
}

TEST_CASE("deep-negative asymptotics follow the tail decay rate", "[weyl]") {
    const IndefiniteProblem prob = build_problem(presets::constant_doc(1.0));
    WeylSolver solver(prob);
    const double lam = -1e4;
    CHECK_THAT(solver.m_plus(lam).scalar(), WithinRel(-std::sqrt(1.0 - lam), 1e-8));
    CHECK_THAT(solver.m_minus(lam).scalar(), WithinRel(std::sqrt(1.0 - lam), 1e-8));
}

TEST_CASE("m+ is strictly increasing below the essential spectrum", "[weyl]") {
    const IndefiniteProblem prob = build_problem(presets::constant_doc(1.0));
    WeylSolver solver(prob);
    double prev_scalar = -1e300;
    double prev_theta_lift = -1e300;
    for (double lam = -3.0; lam < 0.96; lam += 0.2) {
        const auto mp = solver.m_plus(lam);
        REQUIRE(mp.scalar() > prev_scalar);
        // the direction rotates counterclockwise: theta increasing mod pi,
        // and with no pole below the tail it never wraps here
        const double th = mp.theta;
        if (prev_theta_lift > -1e299) REQUIRE(mod_pi(th) > mod_pi(prev_theta_lift));
        prev_theta_lift = th;
        prev_scalar = mp.scalar();
    }
}

TEST_CASE("symmetric coefficients reflect the left coefficient onto the right", "[weyl]") {
    const IndefiniteProblem prob = build_problem(presets::sech2_doc(2));
    WeylSolver solver(prob);
    for (double lam = -8.5; lam < 8.6; lam += 1.7) {
        const auto mp = solver.m_plus(lam);
        const auto mm = solver.m_minus(lam);
        // theta-(lambda) = pi - theta+(lambda) mod pi
        CHECK(proj_dist(mm.theta, pi - mp.theta) <= 1e-8);
        if (std::fabs(mp.scalar()) < 10.0)
            CHECK_THAT(mm.scalar(), WithinAbs(-mp.scalar(), 1e-7));
    }
}

TEST_CASE("the pole of m+ sits at the half-line Dirichlet eigenvalue", "[weyl]") {
    // kappa = 2: the odd bound state at lambda = 8 vanishes at 0, so it is
    // the lone Dirichlet eigenvalue on the half line and the lone pole of m+
    const IndefiniteProblem prob = build_problem(presets::sech2_doc(2));
    WeylSolver solver(prob);
    const auto at_pole = solver.m_plus(8.0);
    CHECK(std::fabs(at_pole.theta - pi / 2.0) <= 1e-5);
    CHECK(solver.m_plus(7.5).is_pole() == false);
    CHECK(solver.m_plus(8.5).is_pole() == false);
}

TEST_CASE("truncation convergence is geometric below the essential spectrum", "[weyl]") {
    const IndefiniteProblem prob = build_problem(presets::constant_doc(1.0));
    const double lam = 0.5;
    SLEquation eq{&prob, lam, +1};
    auto theta_at = [&](double X) {
        const SLState s = integrate_to(eq, SLState{X, 0.0, 1.0}, 0.0).state;
        return mod_pi(std::atan2(s.v, s.u));
    };
    const double exact = mod_pi(std::atan(-std::sqrt(1.0 - lam)));
    const double d5 = proj_dist(theta_at(5.0), exact);
    const double d10 = proj_dist(theta_at(10.0), exact);
    const double d20 = proj_dist(theta_at(20.0), exact);
    CHECK(d10 < 0.1 * d5);   // rate exp(-2 sqrt(0.5) dX)
    CHECK(d20 <= 1e-8);      // already at the integration-noise floor
    CHECK(proj_dist(theta_at(40.0), exact) <= 1e-8);
}

TEST_CASE("essential-spectrum proximity and non-Cauchy truncation are refused", "[weyl]") {
    const IndefiniteProblem prob = build_problem(presets::constant_doc(1.0));
    WeylSolver solver(prob);
    CHECK_THROWS_AS(solver.m_plus(1.0 - 1e-9), EssentialSpectrumProximity);
    CHECK_THROWS_AS(solver.m_plus(2.0), EssentialSpectrumProximity);

    json doc = presets::constant_doc(1.0);
    doc["truncation"] = {{"x0", 5.0}, {"x_max", 10.0}, {"angle_tol", 1e-18}};
    const IndefiniteProblem tight = build_problem(doc);
    WeylSolver tight_solver(tight);
    CHECK_THROWS_AS(tight_solver.m_plus(0.9), NoConvergence);
}

TEST_CASE("cached evaluations are idempotent", "[weyl]") {
    const IndefiniteProblem prob = build_problem(presets::sech2_doc(2));
    WeylSolver solver(prob);
    const auto first = solver.m_plus(4.0);
    const auto again = solver.m_plus(4.0);
    CHECK(first.theta == again.theta);
    CHECK(first.x_used == again.x_used);
}
