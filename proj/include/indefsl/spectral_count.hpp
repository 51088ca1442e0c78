// Oscillation-based eigenvalue counting and localization for the Dirichlet
// half-line operators B+ (right) and B- (left), plus the reflected -B-.
//
// Below the essential spectrum the classical oscillation theorem applies:
// the number of eigenvalues of the truncated Dirichlet problem below lambda
// equals the number of interior zeros of the shooting solution with u(c) = 0,
// which the Pruefer winding counts exactly, and the count stabilizes once the
// truncation passes the classical turning region. Counting and bisection on
// that integer staircase localize eigenvalues.
//
// Inside an essential-spectrum gap that lies above other bands the truncated
// counts are polluted by a boundary-induced eigenvalue that sweeps the gap as
// X grows, so localization there bisects the continuously lifted Weyl angle
// theta(lambda) instead: theta is strictly increasing on the gap and crosses
// pi/2 (mod pi) exactly at the half-line Dirichlet eigenvalues.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "indefsl/coefficients.hpp"
#include "indefsl/common.hpp"
#include "indefsl/ode.hpp"
#include "indefsl/weyl.hpp"

namespace indefsl {

struct HalfLineOperator {
    Side side = Side::plus;
    int sign = +1;  // +1: B_side; -1 with side=minus: the -B- orientation

    std::string tag() const {
        if (side == Side::plus) return "Bplus";
        return sign > 0 ? "Bminus" : "BminusNeg";
    }
};

struct Enclosure {
    double lo = 0.0, hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
    double radius() const { return 0.5 * (hi - lo); }
};

struct CountReport {
    std::string op;
    double a = 0.0, b = 0.0;
    long count = 0;
    bool exact = true;  // false: count is a lower bound (">= count")
    std::vector<Enclosure> eigenvalues;
    double x_used = 0.0;
    bool converged = true;
    nlohmann::json extra;
};

struct CountBelowResult {
    long count = 0;
    bool exact = true;
    double x_used = 0.0;
};

namespace detail {

inline double endpoint_eps(double a, double b) {
    return 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Zeros of the Dirichlet shooting solution strictly inside (c, c +- X).
inline long nodal_count(const IndefiniteProblem& prob, Side side, double lambda, double X,
                        const IntegrationControl& ctrl) {
    return integrate(prob, side, +1, lambda, SLState{prob.c, 0.0, 1.0}, X, ctrl)
        .trace.zero_count;
}

}  // namespace detail

// Number of eigenvalues of B_side below lambda, as the stabilized nodal
// count. If the count is still growing at the truncation ceiling (or passes
// n_max while growing) the result is flagged as a lower bound.
inline CountBelowResult count_below(const IndefiniteProblem& prob, Side side, double lambda,
                                    const IntegrationControl& ctrl = {}, long n_max = 64) {
    if (!prob.ess.clear_of_ess(lambda, 1e-6))
        throw EssentialSpectrumProximity("count_below: lambda = " + std::to_string(lambda) +
                                         " is inside the declared essential spectrum margin");
    const TruncationPolicy& tp = prob.trunc;
    CountBelowResult res;
    long prev = -1;
    int stable = 0;
    for (double X = tp.x0; X <= tp.x_max * (1.0 + 1e-12); X *= tp.growth) {
        const long n = detail::nodal_count(prob, side, lambda, X, ctrl);
        res.count = n;
        res.x_used = X;
        if (n == prev) {
            if (++stable >= tp.count_repeats) {
                res.exact = true;
                return res;
            }
        } else {
            stable = 0;
            if (n >= n_max) {  // accumulation regime; stop enlarging the domain
                res.exact = false;
                return res;
            }
        }
        prev = n;
    }
    res.exact = false;
    return res;
}

inline CountBelowResult count_below(const IndefiniteProblem& prob, const HalfLineOperator& op,
                                    double lambda, const IntegrationControl& ctrl = {},
                                    long n_max = 64) {
    if (op.sign > 0) return count_below(prob, op.side, lambda, ctrl, n_max);
    // eigenvalues of -B- below lambda <=> eigenvalues of B- above -lambda;
    // meaningful only through interval differences, which the callers use
    throw Error("count_below is not defined for the reflected operator; use count_in_interval");
}

// ---------------------------------------------------------------------------
// Interval counts: difference of nodal counts at matched truncation, grown
// until the difference stabilizes. Open-interval semantics via endpoint
// offsets.

struct IntervalCount {
    long count = 0;
    bool exact = true;
    double x_used = 0.0;
};

inline IntervalCount count_in_interval_raw(const IndefiniteProblem& prob, Side side, double a,
                                           double b, const IntegrationControl& ctrl = {},
                                           long n_max = 64) {
    if (!(a < b)) throw Error("count_in_interval: need a < b");
    const double eps = detail::endpoint_eps(a, b);
    const double al = a + eps, bl = b - eps;
    const TruncationPolicy& tp = prob.trunc;
    IntervalCount res;
    long prev = -1;
    int stable = 0;
    for (double X = tp.x0; X <= tp.x_max * (1.0 + 1e-12); X *= tp.growth) {
        const long na = detail::nodal_count(prob, side, al, X, ctrl);
        const long nb = detail::nodal_count(prob, side, bl, X, ctrl);
        const long d = nb - na;
        res.count = std::max(0L, d);
        res.x_used = X;
        if (d == prev) {
            if (++stable >= tp.count_repeats) {
                res.exact = true;
                return res;
            }
        } else {
            stable = 0;
            if (d >= n_max) {
                res.exact = false;
                return res;
            }
        }
        prev = d;
    }
    res.exact = false;
    return res;
}

inline IntervalCount count_in_interval(const IndefiniteProblem& prob, const HalfLineOperator& op,
                                       double a, double b, const IntegrationControl& ctrl = {},
                                       long n_max = 64) {
    if (op.sign > 0) return count_in_interval_raw(prob, op.side, a, b, ctrl, n_max);
    return count_in_interval_raw(prob, op.side, -b, -a, ctrl, n_max);  // -B- reflected
}

// ---------------------------------------------------------------------------
// Localization.

namespace detail {

// Bisection on the nodal-count staircase at one fixed truncation X. The
// staircase is exactly monotone there, so inconsistent counts signal a
// misconfigured tolerance rather than an unlucky lambda.
inline std::vector<Enclosure> bisect_staircase(const IndefiniteProblem& prob, Side side, double a,
                                               double b, double X, double tol,
                                               const IntegrationControl& ctrl) {
    const long na = nodal_count(prob, side, a, X, ctrl);
    const long nb = nodal_count(prob, side, b, X, ctrl);
    if (nb < na) throw BisectionStall("nodal count decreased in lambda at fixed truncation");
    std::vector<Enclosure> out;
    struct Cell {
        double lo, hi;
        long nlo, nhi;
    };
    std::vector<Cell> stack{{a, b, na, nb}};
    while (!stack.empty()) {
        Cell cell = stack.back();
        stack.pop_back();
        const long k = cell.nhi - cell.nlo;
        if (k == 0) continue;
        if (k == 1 && cell.hi - cell.lo <= 2.0 * tol) {
            out.push_back({cell.lo, cell.hi});
            continue;
        }
        const double mid = 0.5 * (cell.lo + cell.hi);
        const long nm = nodal_count(prob, side, mid, X, ctrl);
        if (nm < cell.nlo || nm > cell.nhi)
            throw BisectionStall("nodal count non-monotone at lambda = " + std::to_string(mid));
        stack.push_back({cell.lo, mid, cell.nlo, nm});
        stack.push_back({mid, cell.hi, nm, cell.nhi});
    }
    std::sort(out.begin(), out.end(), [](const Enclosure& x, const Enclosure& y) { return x.lo < y.lo; });
    return out;
}

// Monotone-lift localization of theta(lambda) = pi/2 (mod pi) crossings on a
// gap. Returns enclosures of half-line Dirichlet eigenvalues in (a, b).
inline std::vector<Enclosure> locate_by_angle(const WeylSolver& solver, Side side, double a,
                                              double b, double tol) {
    auto theta_of = [&](double lam) {
        return (side == Side::plus) ? solver.m_plus(lam).theta : solver.m_minus(lam).theta;
    };
    // sample until consecutive lifted increments are unambiguous (< 0.45 pi)
    struct Node {
        double lam, lift;
    };
    std::vector<Node> grid;
    const int n0 = 48;
    grid.push_back({a, theta_of(a)});
    for (int i = 1; i <= n0; ++i) {
        const double lam = a + (b - a) * i / n0;
        grid.push_back({lam, theta_of(lam)});
    }
    // lift pass with on-demand refinement
    for (std::size_t i = 1; i < grid.size();) {
        double step = mod_pi(grid[i].lift) - mod_pi(grid[i - 1].lift);
        // theta is increasing in lambda; wrap the raw difference into [0, pi)
        while (step < 0.0) step += pi;
        if (step >= 0.45 * pi && grid[i].lam - grid[i - 1].lam > 1e-11 * std::max(1.0, std::fabs(b))) {
            const double lam = 0.5 * (grid[i - 1].lam + grid[i].lam);
            grid.insert(grid.begin() + static_cast<long>(i), {lam, theta_of(lam)});
            continue;
        }
        grid[i].lift = grid[i - 1].lift + step;
        ++i;
    }
    std::vector<Enclosure> out;
    // pi/2 + k*pi targets inside the lift range
    const double lift_lo = grid.front().lift, lift_hi = grid.back().lift;
    long k0 = static_cast<long>(std::ceil((lift_lo - pi / 2.0) / pi + 1e-12));
    for (long k = k0;; ++k) {
        const double target = pi / 2.0 + k * pi;
        if (target >= lift_hi) break;
        // bracket from the grid
        std::size_t j = 1;
        while (j < grid.size() && grid[j].lift < target) ++j;
        if (j >= grid.size()) break;
        double lo = grid[j - 1].lam, hi = grid[j].lam;
        double lift_a = grid[j - 1].lift;
        while (hi - lo > 2.0 * tol) {
            const double mid = 0.5 * (lo + hi);
            double th = mod_pi(theta_of(mid));
            // choose the lift branch continuous with the bracket
            double lifted = th + pi * std::round((lift_a - th) / pi);
            while (lifted < lift_a - 0.5 * pi) lifted += pi;
            if (lifted < target) {
                lo = mid;
                lift_a = lifted;
            } else {
                hi = mid;
            }
        }
        out.push_back({lo, hi});
    }
    return out;
}

}  // namespace detail

// Locate all eigenvalues of op in (a, b) with enclosure radius <= tol.
// Positions are re-derived under truncation growth until stable.
inline std::vector<Enclosure> locate_eigenvalues(const WeylSolver& solver,
                                                 const HalfLineOperator& op, double a, double b,
                                                 double tol = 1e-6, long n_max = 64) {
    const IndefiniteProblem& prob = solver.problem();
    double lo = a, hi = b;
    if (op.sign < 0) {
        lo = -b;
        hi = -a;
    }
    const double eps = detail::endpoint_eps(lo, hi);
    const double al = lo + eps, bl = hi - eps;

    std::vector<Enclosure> found;
    const auto top = prob.ess.lower_gap_top();
    const bool below_ess = top.has_value() && bl <= *top - 1e-9;
    if (below_ess) {
        const IntervalCount ic =
            count_in_interval_raw(prob, op.side, lo, hi, solver.control(), n_max);
        if (!ic.exact)
            throw NoConvergence("interval count did not stabilize; cannot localize " +
                                std::to_string(ic.count) + "+ eigenvalues");
        if (ic.count == 0) return {};
        const TruncationPolicy& tp = prob.trunc;
        double X = ic.x_used;
        found = detail::bisect_staircase(prob, op.side, al, bl, X, tol, solver.control());
        for (int round = 0; round < 4; ++round) {
            if (X * tp.growth > tp.x_max * (1.0 + 1e-12)) break;
            X *= tp.growth;
            auto refined = detail::bisect_staircase(prob, op.side, al, bl, X, tol, solver.control());
            if (refined.size() != found.size()) {
                found = refined;
                continue;
            }
            double shift = 0.0;
            for (std::size_t i = 0; i < found.size(); ++i)
                shift = std::max(shift, std::fabs(refined[i].mid() - found[i].mid()));
            found = refined;
            if (shift <= 0.5 * tol) break;
        }
    } else {
        found = detail::locate_by_angle(solver, op.side, al, bl, tol);
    }

    if (op.sign < 0) {
        std::vector<Enclosure> neg;
        neg.reserve(found.size());
        for (auto it = found.rbegin(); it != found.rend(); ++it) neg.push_back({-it->hi, -it->lo});
        return neg;
    }
    return found;
}

// Interval count packaged as a report, with located eigenvalues when finite.
inline CountReport count_report(const WeylSolver& solver, const HalfLineOperator& op, double a,
                                double b, double tol = 1e-6, long n_max = 64,
                                bool localize = true) {
    const IndefiniteProblem& prob = solver.problem();
    CountReport rep;
    rep.op = op.tag();
    rep.a = a;
    rep.b = b;
    const IntervalCount ic = count_in_interval(prob, op, a, b, solver.control(), n_max);
    rep.count = ic.count;
    rep.exact = ic.exact;
    rep.x_used = ic.x_used;
    rep.converged = ic.exact;
    if (localize && ic.exact && ic.count > 0) {
        rep.eigenvalues = locate_eigenvalues(solver, op, a, b, tol, n_max);
        if (static_cast<long>(rep.eigenvalues.size()) != rep.count) {
            // trust the localization when the two disagree at gap edges
            rep.count = static_cast<long>(rep.eigenvalues.size());
            rep.extra["count_adjusted_by_localization"] = true;
        }
    }
    return rep;
}

}  // namespace indefsl
