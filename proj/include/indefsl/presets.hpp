// Ready-made problem documents used by the test suites and the CLI examples.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "indefsl/coefficients.hpp"
#include "indefsl/common.hpp"

namespace indefsl::presets {

using nlohmann::json;

// r = sgn x, p = 1, q = (kappa+1)^2 - kappa(kappa+1)/cosh^2 x.
// The definite operator has exactly kappa eigenvalues (kappa+1)^2 - (kappa-n)^2,
// n = 0..kappa-1, below its essential spectrum [(kappa+1)^2, inf).
inline json sech2_doc(int kappa, double x0 = 30.0) {
    const double level = static_cast<double>((kappa + 1) * (kappa + 1));
    const double depth = static_cast<double>(kappa * (kappa + 1));
    return json{
        {"r", {{"builtin", "sign"}}},
        {"p", {{"builtin", "constant"}, {"params", {{"value", 1.0}}}}},
        {"q", {{"builtin", "sech2"}, {"params", {{"level", level}, {"depth", depth}}}}},
        {"c", 0.0},
        {"symmetric", true},
        {"ess_model", {{"variant", "constant_tail"}, {"q_inf", level}}},
        {"truncation", {{"x0", x0}}}};
}

inline json constant_doc(double q = 1.0, double x0 = 20.0) {
    return json{
        {"r", {{"builtin", "sign"}}},
        {"p", {{"builtin", "constant"}, {"params", {{"value", 1.0}}}}},
        {"q", {{"builtin", "constant"}, {"params", {{"value", q}}}}},
        {"c", 0.0},
        {"symmetric", true},
        {"ess_model", {{"variant", "constant_tail"}, {"q_inf", q}}},
        {"truncation", {{"x0", x0}}}};
}

// q = q_inf + amplitude * (1 + x^2)^(-power); amplitude < 0 digs below the tail.
inline json rational_tail_doc(double q_inf, double amplitude, double power, double x0 = 25.0,
                              double x_max = 400.0) {
    return json{
        {"r", {{"builtin", "sign"}}},
        {"p", {{"builtin", "constant"}, {"params", {{"value", 1.0}}}}},
        {"q",
         {{"builtin", "rational_tail"},
          {"params", {{"base", q_inf}, {"amplitude", amplitude}, {"power", power}}}}},
        {"c", 0.0},
        {"symmetric", true},
        {"ess_model", {{"variant", "constant_tail"}, {"q_inf", q_inf}}},
        {"truncation", {{"x0", x0}, {"x_max", x_max}}}};
}

// Supercritical Kneser tail: limsup x^2 (q - q_inf) = -inf < -1/4, so the
// eigenvalues of the half-line operators accumulate to q_inf from below at a
// rate a desk-scale truncation actually resolves.
inline json kneser_supercritical_doc() { return rational_tail_doc(1.0, -0.9, 0.0625); }

// Subcritical: liminf x^2 (q - q_inf) = -0.1 > -1/4, finitely many eigenvalues.
inline json kneser_subcritical_doc() { return rational_tail_doc(1.0, -0.1, 1.0); }

// q = offset + amp cos(2 pi x / gamma), gamma-periodic with r = sgn x.
inline json periodic_cos_doc(double offset = 10.0, double amp = 2.0, double gamma = 1.0,
                             double x0 = 16.0) {
    return json{
        {"r", {{"builtin", "sign"}}},
        {"p", {{"builtin", "constant"}, {"params", {{"value", 1.0}}}}},
        {"q",
         {{"builtin", "trig_periodic"},
          {"params", {{"offset", offset}, {"amplitude", amp}, {"omega", 2.0 * pi / gamma}, {"phase", 0.0}}}}},
        {"c", 0.0},
        {"symmetric", true},
        {"ess_model", {{"variant", "periodic_bands"}, {"period", gamma}}},
        {"truncation", {{"x0", x0}, {"x_max", 256.0}}}};
}

// ---------------------------------------------------------------------------
// Seeded random-well regression family: q = q_inf - sum of Gaussian wells,
// kept strictly positive so the left-definite condition holds.

struct SuiteCase {
    std::string name;
    json doc;
    double gap_lo = 0.0, gap_hi = 0.0;  // interval inside the spectral gap (0, q_inf)
    bool symmetric = false;
};

inline std::vector<SuiteCase> seeded_suite(int n_cases = 20, std::uint64_t seed = 0x1db7a5eed) {
    std::vector<SuiteCase> out;
    out.reserve(n_cases);
    for (int k = 0; k < n_cases; ++k) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
        const bool symmetric = (k % 2 == 0);
        const double q_inf = uniform(rng, 1.5, 6.0);
        const int n_wells = 1 + static_cast<int>(uniform(rng, 0.0, 3.0));
        double budget = 0.85 * q_inf;
        std::vector<Coefficient::Well> wells;
        for (int j = 0; j < n_wells; ++j) {
            const double amp = uniform(rng, 0.25, 0.9) * budget / n_wells;
            const double center = symmetric ? 0.0 : uniform(rng, -3.0, 3.0);
            const double width = uniform(rng, 0.6, 3.0);
            if (symmetric && j > 0) {
                const double off = uniform(rng, 0.5, 2.5);
                wells.push_back({0.5 * amp, off, width});
                wells.push_back({0.5 * amp, -off, width});
            } else {
                wells.push_back({amp, center, width});
            }
        }
        json jwells = json::array();
        for (const auto& w : wells)
            jwells.push_back({{"amplitude", w.amplitude}, {"center", w.center}, {"width", w.width}});
        json doc{
            {"r", {{"builtin", "sign"}}},
            {"p", {{"builtin", "constant"}, {"params", {{"value", 1.0}}}}},
            {"q", {{"builtin", "gaussian_wells"}, {"params", {{"base", q_inf}, {"wells", jwells}}}}},
            {"c", 0.0},
            {"symmetric", symmetric},
            {"ess_model", {{"variant", "constant_tail"}, {"q_inf", q_inf}}},
            {"truncation", {{"x0", 20.0}}}};
        SuiteCase sc;
        sc.name = "well_" + std::to_string(k) + (symmetric ? "_sym" : "_asym");
        sc.doc = std::move(doc);
        sc.gap_lo = 0.0;
        sc.gap_hi = q_inf;
        sc.symmetric = symmetric;
        out.push_back(std::move(sc));
    }
    return out;
}

}  // namespace indefsl::presets
