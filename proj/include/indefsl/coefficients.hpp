// Coefficient model for the indefinite Sturm-Liouville problem
//
//   (1/r) ( -(p u')' + q u )      with r < 0 on (-inf,c), r > 0 on (c,inf),
//
// plus the validated problem container shared by every other module.
// Coefficients are either built-in closed forms or parsed expressions;
// validation is by sampling (the coefficients are only locally integrable,
// so pointwise checks on a grid are the testable proxy).
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "indefsl/common.hpp"
#include "indefsl/expr.hpp"

namespace indefsl {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Coefficient: an evaluable real function of x with declared breakpoints.

class Coefficient {
  public:
    Coefficient() = default;
    Coefficient(std::string kind, std::function<double(double)> f,
                std::vector<double> breakpoints, json descriptor)
        : kind_(std::move(kind)),
          f_(std::move(f)),
          breakpoints_(std::move(breakpoints)),
          descriptor_(std::move(descriptor)) {
        std::sort(breakpoints_.begin(), breakpoints_.end());
    }

    double operator()(double x) const { return f_(x); }
    const std::string& kind() const { return kind_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const json& descriptor() const { return descriptor_; }

    static Coefficient constant(double value) {
        return Coefficient("constant", [value](double) { return value; }, {},
                           json{{"builtin", "constant"}, {"params", {{"value", value}}}});
    }

    // base + amplitude * (1+x^2)^(-power)
    static Coefficient rational_tail(double base, double amplitude, double power) {
        return Coefficient(
            "rational_tail",
            [=](double x) { return base + amplitude * std::pow(1.0 + x * x, -power); }, {},
            json{{"builtin", "rational_tail"},
                 {"params", {{"base", base}, {"amplitude", amplitude}, {"power", power}}}});
    }

    // level - depth / cosh(x)^2
    static Coefficient sech2(double level, double depth) {
        return Coefficient(
            "sech2",
            [=](double x) {
                const double ch = std::cosh(x);
                return level - depth / (ch * ch);
            },
            {}, json{{"builtin", "sech2"}, {"params", {{"level", level}, {"depth", depth}}}});
    }

    // offset + amplitude * cos(omega*x + phase)
    static Coefficient trig_periodic(double offset, double amplitude, double omega,
                                     double phase = 0.0) {
        return Coefficient("trig_periodic",
                           [=](double x) { return offset + amplitude * std::cos(omega * x + phase); },
                           {},
                           json{{"builtin", "trig_periodic"},
                                {"params",
                                 {{"offset", offset},
                                  {"amplitude", amplitude},
                                  {"omega", omega},
                                  {"phase", phase}}}});
    }

    // sgn(x - center)
    static Coefficient sign(double center = 0.0) {
        return Coefficient("sign",
                           [=](double x) { return static_cast<double>(sign_of(x - center)); },
                           {center},
                           json{{"builtin", "sign"}, {"params", {{"center", center}}}});
    }

    // base - sum_j amplitude_j * exp(-(x-center_j)^2 / width_j)
    struct Well {
        double amplitude, center, width;
    };
    static Coefficient gaussian_wells(double base, std::vector<Well> wells) {
        json jwells = json::array();
        for (const Well& w : wells)
            jwells.push_back({{"amplitude", w.amplitude}, {"center", w.center}, {"width", w.width}});
        return Coefficient(
            "gaussian_wells",
            [base, wells = std::move(wells)](double x) {
                double v = base;
                for (const Well& w : wells) {
                    const double d = x - w.center;
                    v -= w.amplitude * std::exp(-d * d / w.width);
                }
                return v;
            },
            {}, json{{"builtin", "gaussian_wells"}, {"params", {{"base", base}, {"wells", jwells}}}});
    }

    static Coefficient expression(const std::string& text, std::vector<double> breakpoints = {}) {
        Expr e = Expr::parse(text);
        json desc{{"expr", text}};
        if (!breakpoints.empty()) desc["breakpoints"] = breakpoints;
        return Coefficient("expr", [e = std::move(e)](double x) { return e(x); },
                           std::move(breakpoints), std::move(desc));
    }

    static Coefficient from_json(const json& j);

  private:
    std::string kind_;
    std::function<double(double)> f_;
    std::vector<double> breakpoints_;
    json descriptor_;
};

inline Coefficient Coefficient::from_json(const json& j) {
    if (j.contains("expr")) {
        std::vector<double> bps;
        if (j.contains("breakpoints")) bps = j["breakpoints"].get<std::vector<double>>();
        return Coefficient::expression(j["expr"].get<std::string>(), std::move(bps));
    }
    if (!j.contains("builtin"))
        throw ParseError("coefficient needs either \"builtin\" or \"expr\": " + j.dump());
    const std::string name = j["builtin"].get<std::string>();
    const json p = j.value("params", json::object());
    auto get = [&](const char* key, std::optional<double> dflt = std::nullopt) -> double {
        if (p.contains(key)) return p[key].get<double>();
        if (dflt) return *dflt;
        throw ParseError("builtin '" + name + "' missing parameter '" + key + "'");
    };
    if (name == "constant") return Coefficient::constant(get("value"));
    if (name == "rational_tail")
        return Coefficient::rational_tail(get("base"), get("amplitude"), get("power"));
    if (name == "sech2") return Coefficient::sech2(get("level"), get("depth"));
    if (name == "trig_periodic")
        return Coefficient::trig_periodic(get("offset"), get("amplitude"), get("omega"),
                                          get("phase", 0.0));
    if (name == "sign") return Coefficient::sign(get("center", 0.0));
    if (name == "gaussian_wells") {
        std::vector<Coefficient::Well> wells;
        for (const json& w : p.at("wells"))
            wells.push_back({w.at("amplitude").get<double>(), w.at("center").get<double>(),
                             w.at("width").get<double>()});
        return Coefficient::gaussian_wells(get("base"), std::move(wells));
    }
    throw ParseError("unknown builtin coefficient '" + name + "'");
}

// ---------------------------------------------------------------------------
// Essential spectrum model (declared, not computed).

struct EssentialSpectrumModel {
    enum class Variant { ConstantTail, PeriodicBands, DeclaredGaps };
    Variant variant = Variant::ConstantTail;
    double q_inf = 1.0;                                // ConstantTail: sigma_ess = [q_inf, inf)
    double period = 1.0;                               // PeriodicBands
    std::vector<std::pair<double, double>> gaps;       // DeclaredGaps, each (a,b), 0 <= a < b

    // Upper edge of the resolvent set component below the essential spectrum,
    // when the model declares one.
    std::optional<double> lower_gap_top() const {
        switch (variant) {
            case Variant::ConstantTail: return q_inf;
            case Variant::DeclaredGaps:
                for (const auto& [a, b] : gaps)
                    if (a == 0.0) return b;
                return std::nullopt;
            case Variant::PeriodicBands: return std::nullopt;
        }
        return std::nullopt;
    }

    // Whether lambda keeps the margin eps from the declared essential spectrum.
    // PeriodicBands carries no static edges; the caller's convergence
    // monitoring is the backstop there.
    bool clear_of_ess(double lambda, double eps) const {
        switch (variant) {
            case Variant::ConstantTail: return lambda <= q_inf - eps;
            case Variant::DeclaredGaps: {
                if (lambda <= 0.0) return true;  // sigma_ess(A) sits in (0, inf)
                for (const auto& [a, b] : gaps)
                    if (lambda >= (a == 0.0 ? 0.0 : a + eps) && lambda <= b - eps) return true;
                return false;
            }
            case Variant::PeriodicBands: return true;
        }
        return true;
    }

    // Clamp a scan endpoint away from the declared essential-spectrum edges.
    // Weyl-angle convergence degrades like exp(-2 sqrt(dist) X) near an edge,
    // so scans keep an absolute guard distance; counting probes need far less.
    double clamp_hi(double x, double guard) const {
        switch (variant) {
            case Variant::ConstantTail: return std::min(x, q_inf - guard);
            case Variant::DeclaredGaps:
                for (const auto& [a, b] : gaps)
                    if (x > a && x <= b) return std::min(x, b - guard);
                return x;
            case Variant::PeriodicBands: return x;
        }
        return x;
    }
    double clamp_lo(double x, double guard) const {
        switch (variant) {
            case Variant::ConstantTail: return std::max(x, -q_inf + guard);
            case Variant::DeclaredGaps:
                for (const auto& [a, b] : gaps)
                    if (-x > a && -x <= b) return std::max(x, -b + guard);
                return x;
            case Variant::PeriodicBands: return x;
        }
        return x;
    }

    static EssentialSpectrumModel from_json(const json& j) {
        EssentialSpectrumModel m;
        const std::string v = j.at("variant").get<std::string>();
        if (v == "constant_tail") {
            m.variant = Variant::ConstantTail;
            m.q_inf = j.at("q_inf").get<double>();
            if (!(m.q_inf > 0.0)) throw ParseError("constant_tail requires q_inf > 0");
        } else if (v == "periodic_bands") {
            m.variant = Variant::PeriodicBands;
            m.period = j.at("period").get<double>();
            if (!(m.period > 0.0)) throw ParseError("periodic_bands requires period > 0");
        } else if (v == "declared_gaps") {
            m.variant = Variant::DeclaredGaps;
            for (const json& g : j.at("gaps")) {
                double a = g.at(0).get<double>(), b = g.at(1).get<double>();
                if (!(a >= 0.0 && a < b)) throw ParseError("declared gap needs 0 <= a < b");
                m.gaps.emplace_back(a, b);
            }
            std::sort(m.gaps.begin(), m.gaps.end());
            for (std::size_t i = 1; i < m.gaps.size(); ++i)
                if (m.gaps[i].first < m.gaps[i - 1].second)
                    throw ParseError("declared gaps must be pairwise disjoint");
        } else {
            throw ParseError("unknown ess_model variant '" + v + "'");
        }
        return m;
    }

    json to_json() const {
        switch (variant) {
            case Variant::ConstantTail:
                return {{"variant", "constant_tail"}, {"q_inf", q_inf}};
            case Variant::PeriodicBands:
                return {{"variant", "periodic_bands"}, {"period", period}};
            case Variant::DeclaredGaps: {
                json jg = json::array();
                for (const auto& [a, b] : gaps) jg.push_back({a, b});
                return {{"variant", "declared_gaps"}, {"gaps", jg}};
            }
        }
        return {};
    }
};

// ---------------------------------------------------------------------------
// Truncation policy for half-line shooting.

struct TruncationPolicy {
    double x0 = 20.0;        // initial half-width
    double growth = 2.0;     // X multiplier per convergence round
    double x_max = 320.0;    // ceiling (INDEFSL_MAX_X can raise/lower it)
    double angle_tol = 1e-9; // projective convergence tolerance
    int count_repeats = 2;   // equal consecutive counts required for convergence

    static TruncationPolicy from_json(const json& j) {
        TruncationPolicy t;
        t.x0 = j.value("x0", t.x0);
        t.growth = j.value("growth", t.growth);
        t.x_max = j.value("x_max", t.x_max);
        t.angle_tol = j.value("angle_tol", t.angle_tol);
        t.count_repeats = j.value("count_repeats", t.count_repeats);
        if (!(t.x0 > 0.0 && t.growth > 1.0 && t.x_max >= t.x0))
            throw ParseError("truncation policy requires x0 > 0, growth > 1, x_max >= x0");
        return t;
    }
    json to_json() const {
        return {{"x0", x0},
                {"growth", growth},
                {"x_max", x_max},
                {"angle_tol", angle_tol},
                {"count_repeats", count_repeats}};
    }
};

// ---------------------------------------------------------------------------
// Validated problem.

struct ValidationReport {
    bool sign_pattern_checked = false;   // condition on r (strict sign change at c)
    bool symmetry_checked = false;       // even p,q / odd r when declared symmetric
    double max_p_defect = 0.0;           // reserved: worst p <= 0 excess (throws instead)
    double max_symmetry_defect = 0.0;
    int grid_points = 0;
};

struct SymmetryReport {
    double p_defect = 0.0;  // max |p(x)-p(-x)|
    double q_defect = 0.0;  // max |q(x)-q(-x)|
    double r_defect = 0.0;  // max |r(x)+r(-x)|
    bool symmetric_flag = false;
    bool consistent = false;  // flag agrees with defects at 1e-12
};

class IndefiniteProblem {
  public:
    Coefficient r, p, q;
    double c = 0.0;
    bool symmetric = false;
    EssentialSpectrumModel ess;
    TruncationPolicy trunc;
    ValidationReport validation;

    double abs_r(double x) const { return std::fabs(r(x)); }
    double inv_p(double x) const { return 1.0 / p(x); }

    const std::string& digest() const { return digest_; }
    const json& source() const { return source_; }

    // Breakpoints of any coefficient inside (lo, hi), sorted.
    std::vector<double> breakpoints_in(double lo, double hi) const {
        std::vector<double> out;
        for (const Coefficient* cf : {&r, &p, &q})
            for (double b : cf->breakpoints())
                if (b > lo && b < hi) out.push_back(b);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    void finalize(json source_doc) {
        source_ = std::move(source_doc);
        digest_ = hex_digest(fnv1a(source_.dump()));
    }

  private:
    json source_;
    std::string digest_;
};

// ---------------------------------------------------------------------------
// build_problem: parse + sampled validation of the sign/positivity conditions.

namespace detail {

inline std::vector<double> validation_grid(const IndefiniteProblem& prob, int n) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n) + 8);
    const double X = prob.trunc.x0;
    for (int i = 0; i < n; ++i)
        xs.push_back(-X + (2.0 * X * i) / (n - 1));
    for (double b : prob.breakpoints_in(-X, X)) {
        // sample just off each breakpoint; the value at the point itself may
        // be an arbitrary representative of the L1_loc class
        xs.push_back(b - 1e-9);
        xs.push_back(b + 1e-9);
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

}  // namespace detail

inline IndefiniteProblem build_problem(const json& doc, int grid_points = 10000) {
    IndefiniteProblem prob;
    try {
        prob.r = Coefficient::from_json(doc.at("r"));
        prob.p = Coefficient::from_json(doc.at("p"));
        prob.q = Coefficient::from_json(doc.at("q"));
        prob.c = doc.value("c", 0.0);
        prob.symmetric = doc.value("symmetric", false);
        prob.ess = EssentialSpectrumModel::from_json(doc.at("ess_model"));
        prob.trunc = doc.contains("truncation") ? TruncationPolicy::from_json(doc["truncation"])
                                                : TruncationPolicy{};
    } catch (const json::exception& e) {
        throw ParseError(std::string("problem document: ") + e.what());
    }
    if (const char* cap = std::getenv("INDEFSL_MAX_X")) {
        try {
            prob.trunc.x_max = std::stod(cap);
        } catch (...) {
            throw ParseError("INDEFSL_MAX_X is not a number");
        }
    }

    const auto xs = detail::validation_grid(prob, grid_points);
    const double c_tol = 1e-12 * std::max(1.0, std::fabs(prob.c));
    for (double x : xs) {
        const double pv = prob.p(x);
        if (!(pv > 0.0))
            throw NonpositiveP("p(" + std::to_string(x) + ") = " + std::to_string(pv) +
                               " is not positive");
        if (std::fabs(x - prob.c) <= c_tol) continue;  // sign of r undefined at c itself
        const double rv = prob.r(x);
        if (x > prob.c && !(rv > 0.0))
            throw SignPatternViolation("r(" + std::to_string(x) + ") = " + std::to_string(rv) +
                                       " must be positive right of c");
        if (x < prob.c && !(rv < 0.0))
            throw SignPatternViolation("r(" + std::to_string(x) + ") = " + std::to_string(rv) +
                                       " must be negative left of c");
    }
    prob.validation.sign_pattern_checked = true;
    prob.validation.grid_points = static_cast<int>(xs.size());

    if (prob.symmetric) {
        if (prob.c != 0.0)
            throw SymmetryDeclaredButViolated("symmetric problems require c = 0");
        double defect = 0.0;
        for (double x : xs) {
            if (x <= 0.0) continue;
            defect = std::max(defect, std::fabs(prob.p(x) - prob.p(-x)));
            defect = std::max(defect, std::fabs(prob.q(x) - prob.q(-x)));
            defect = std::max(defect, std::fabs(prob.r(x) + prob.r(-x)));
        }
        prob.validation.max_symmetry_defect = defect;
        if (defect > 1e-12)
            throw SymmetryDeclaredButViolated("declared symmetric but sampled defect " +
                                              std::to_string(defect));
        prob.validation.symmetry_checked = true;
    }

    prob.finalize(doc);
    return prob;
}

inline SymmetryReport check_symmetry(const IndefiniteProblem& prob, int grid_points = 10000) {
    SymmetryReport rep;
    rep.symmetric_flag = prob.symmetric;
    const double X = prob.trunc.x0;
    for (int i = 1; i <= grid_points; ++i) {
        const double x = (X * i) / grid_points;
        rep.p_defect = std::max(rep.p_defect, std::fabs(prob.p(x) - prob.p(-x)));
        rep.q_defect = std::max(rep.q_defect, std::fabs(prob.q(x) - prob.q(-x)));
        rep.r_defect = std::max(rep.r_defect, std::fabs(prob.r(x) + prob.r(-x)));
    }
    const bool sym = prob.c == 0.0 && rep.p_defect <= 1e-12 && rep.q_defect <= 1e-12 &&
                     rep.r_defect <= 1e-12;
    rep.consistent = (sym == prob.symmetric);
    return rep;
}

}  // namespace indefsl
