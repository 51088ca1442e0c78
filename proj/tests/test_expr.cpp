#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "indefsl/expr.hpp"

using namespace indefsl;

TEST_CASE("expression grammar evaluates the supported operators", "[expr]") {
    CHECK(Expr::parse("1+2*3")(0.0) == 7.0);
    CHECK(Expr::parse("(1+2)*3")(0.0) == 9.0);
    CHECK(Expr::parse("2^3^2")(0.0) == 512.0);  // right associative
    CHECK(Expr::parse("-x^2")(3.0) == -9.0);
    CHECK(Expr::parse("10 - 4 - 3")(0.0) == 3.0);  // left associative
    CHECK(Expr::parse("sgn(x)")(2.5) == 1.0);
    CHECK(Expr::parse("sgn(x)")(-2.5) == -1.0);
    CHECK(Expr::parse("sgn(x)")(0.0) == 0.0);
    CHECK_THAT(Expr::parse("cos(pi)")(0.0), Catch::Matchers::WithinAbs(-1.0, 1e-15));
    CHECK_THAT(Expr::parse("cosh(1)")(0.0), Catch::Matchers::WithinRel(std::cosh(1.0), 1e-15));
    CHECK_THAT(Expr::parse("exp(-x)")(2.0), Catch::Matchers::WithinRel(std::exp(-2.0), 1e-15));
    CHECK(Expr::parse("abs(-3.5)")(0.0) == 3.5);
}

TEST_CASE("expression parser rejects malformed input", "[expr]") {
    CHECK_THROWS_AS(Expr::parse("1 +"), ParseError);
    CHECK_THROWS_AS(Expr::parse("foo(x)"), ParseError);
    CHECK_THROWS_AS(Expr::parse("(1+2"), ParseError);
    CHECK_THROWS_AS(Expr::parse("cos x"), ParseError);
    CHECK_THROWS_AS(Expr::parse("1 2"), ParseError);
    CHECK_THROWS_AS(Expr::parse(""), ParseError);
}

TEST_CASE("parsed expressions match direct evaluation on random points", "[expr]") {
    const Expr e = Expr::parse("(3+1)^2 - 3*(3+1)/cosh(x)^2 + 0.5*sin(2*x) - exp(-abs(x))");
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> d(-20.0, 20.0);
    for (int i = 0; i < 10000; ++i) {
        const double x = d(rng);
        const double ch = std::cosh(x);
        const double want = 16.0 - 12.0 / (ch * ch) + 0.5 * std::sin(2.0 * x) - std::exp(-std::fabs(x));
        REQUIRE_THAT(e(x), Catch::Matchers::WithinRel(want, 1e-15));
    }
}
