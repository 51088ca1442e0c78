// Verification harness: each spectral statement becomes a pass/fail check
// over a problem and an interval, with "inconclusive" as a first-class
// verdict so unconverged numerics never masquerade as a counterexample.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "indefsl/common.hpp"
#include "indefsl/matching.hpp"
#include "indefsl/spectral_count.hpp"
#include "indefsl/weyl.hpp"

namespace indefsl {

enum class Verdict { holds, violated, inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::violated: return "violated";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct TheoremReport {
    std::string id;
    std::string problem_digest;
    double a = 0.0, b = 0.0;
    nlohmann::json measured;  // every count entering the check
    std::string bound;        // the identity or inequality checked
    Verdict verdict = Verdict::inconclusive;
    std::string reason;
};

namespace detail {

inline TheoremReport base_report(const WeylSolver& solver, const char* id, double a, double b) {
    TheoremReport rep;
    rep.id = id;
    rep.problem_digest = solver.problem().digest();
    rep.a = a;
    rep.b = b;
    return rep;
}

}  // namespace detail

// |n_A(a,b) - (n_JA(-b,-a) + n_JA(a,b))| <= 3 on a gap of the essential
// spectrum; when counts run away, both sides must run away together.
inline TheoremReport verify_count_estimate(const WeylSolver& solver, double a, double b,
                                           const ScanOptions& opt = {}) {
    TheoremReport rep = detail::base_report(solver, "count_estimate", a, b);
    rep.bound = "|n_A - (n_JA(-b,-a) + n_JA(a,b))| <= 3";
    try {
        const CountReport na = eigenvalues_A(solver, a, b, opt);
        const CountReport nja = eigenvalues_JA(solver, std::max(a, 0.0), b, opt);
        rep.measured["n_A"] = na.count;
        rep.measured["n_JA_total"] = nja.count;
        rep.measured["n_JA_negative"] = nja.extra["count_negative"];
        rep.measured["n_JA_positive"] = nja.extra["count_positive"];
        const long diff = std::labs(na.count - nja.count);
        rep.measured["discrepancy"] = diff;
        rep.verdict = (diff <= 3) ? Verdict::holds : Verdict::violated;
        if (rep.verdict == Verdict::violated) rep.reason = "discrepancy " + std::to_string(diff);
    } catch (const NoConvergence& e) {
        // accumulation regime: both sides must exceed the cap together
        const auto cb_p = count_in_interval_raw(solver.problem(), Side::plus, a, b,
                                                solver.control(), opt.n_max);
        const auto cb_m = count_in_interval_raw(solver.problem(), Side::minus, a, b,
                                                solver.control(), opt.n_max);
        const long pole_total = cb_p.count + cb_m.count;
        rep.measured["n_B_raw_lower_bound"] = pole_total;
        rep.measured["exceeds_cap"] = pole_total >= opt.n_max;
        if (pole_total >= opt.n_max) {
            rep.verdict = Verdict::holds;
            rep.reason = std::string("both counts exceed the cap together (") + e.what() + ")";
        } else {
            rep.verdict = Verdict::inconclusive;
            rep.reason = e.what();
        }
    }
    return rep;
}

// |n_A(a,b) - n_B(a,b)| <= 1 with n_B = n_{B+} + n_{B-} (the full-line and
// decoupled operators differ by a rank-one resolvent perturbation).
inline TheoremReport verify_rank_one_perturbation(const WeylSolver& solver, double a, double b,
                                                  const ScanOptions& opt = {}) {
    TheoremReport rep = detail::base_report(solver, "rank_one_perturbation", a, b);
    rep.bound = "|n_A - (n_B+ + n_B-)| <= 1";
    try {
        const CountReport na = eigenvalues_A(solver, a, b, opt);
        const IntervalCount bp =
            count_in_interval_raw(solver.problem(), Side::plus, a, b, solver.control(), opt.n_max);
        const IntervalCount bm =
            count_in_interval_raw(solver.problem(), Side::minus, a, b, solver.control(), opt.n_max);
        if (!bp.exact || !bm.exact) {
            rep.verdict = Verdict::inconclusive;
            rep.reason = "half-line counts did not stabilize";
            return rep;
        }
        rep.measured["n_A"] = na.count;
        rep.measured["n_Bplus"] = bp.count;
        rep.measured["n_Bminus"] = bm.count;
        const long diff = std::labs(na.count - (bp.count + bm.count));
        rep.measured["discrepancy"] = diff;
        rep.verdict = (diff <= 1) ? Verdict::holds : Verdict::violated;
        if (rep.verdict == Verdict::violated) rep.reason = "discrepancy " + std::to_string(diff);
    } catch (const NoConvergence& e) {
        rep.verdict = Verdict::inconclusive;
        rep.reason = e.what();
    }
    return rep;
}

// Symmetric coefficients, 0 <= alpha < min sigma(A) < beta <= min sigma_ess(A):
// n_JA equals n_A/2 exactly (n_A even) or (n_A +- 1)/2 (n_A odd), identically
// on both half axes.
inline TheoremReport verify_symmetric_halving(const WeylSolver& solver, double alpha, double beta,
                                              const ScanOptions& opt = {}) {
    TheoremReport rep = detail::base_report(solver, "symmetric_halving", alpha, beta);
    rep.bound = "n_JA = n_A/2 (even) or (n_A +- 1)/2 (odd), equal on both sides";
    const IndefiniteProblem& prob = solver.problem();
    if (!prob.symmetric) {
        rep.verdict = Verdict::inconclusive;
        rep.reason = "problem is not declared symmetric";
        return rep;
    }
    const auto top = prob.ess.lower_gap_top();
    if (top && beta > *top * (1.0 + 1e-12)) {
        rep.verdict = Verdict::inconclusive;
        rep.reason = "beta exceeds the declared bottom of the essential spectrum";
        return rep;
    }
    try {
        const CountReport na = eigenvalues_A(solver, alpha, beta, opt);
        rep.measured["n_A"] = na.count;
        if (na.count == 0 || na.eigenvalues.front().lo <= alpha) {
            rep.verdict = Verdict::inconclusive;
            rep.reason = "alpha does not lie strictly below the smallest eigenvalue of A";
            return rep;
        }
        const CountReport nja = eigenvalues_JA(solver, alpha, beta, opt);
        const long n_pos = nja.extra["count_positive"].get<long>();
        const long n_neg = nja.extra["count_negative"].get<long>();
        rep.measured["n_JA_positive"] = n_pos;
        rep.measured["n_JA_negative"] = n_neg;
        bool ok = (n_pos == n_neg);
        if (na.count % 2 == 0)
            ok = ok && (n_pos == na.count / 2);
        else
            ok = ok && (n_pos == (na.count - 1) / 2 || n_pos == (na.count + 1) / 2);
        rep.verdict = ok ? Verdict::holds : Verdict::violated;
        if (!ok) rep.reason = "halving relation failed";
    } catch (const NoConvergence& e) {
        rep.verdict = Verdict::inconclusive;
        rep.reason = e.what();
    }
    return rep;
}

// Interlacing of positive JA eigenvalues with consecutive pairs of A
// eigenvalues in a gap (symmetric coefficients): exactly one of the two
// pairings holds, and the odd-indexed pairing is forced when the gap starts
// below min sigma(A).
inline TheoremReport verify_interlacing_with_A(const WeylSolver& solver, double a, double b,
                                               const ScanOptions& opt = {}) {
    TheoremReport rep = detail::base_report(solver, "interlacing", a, b);
    rep.bound = "lambda_k(JA) in (lambda_{2k-1}, lambda_{2k}) or the shifted variant";
    const IndefiniteProblem& prob = solver.problem();
    if (!prob.symmetric) {
        rep.verdict = Verdict::inconclusive;
        rep.reason = "problem is not declared symmetric";
        return rep;
    }
    try {
        const CountReport na = eigenvalues_A(solver, a, b, opt);
        const ZeroPoleScan pos = scan(solver, MatchingKind::M_for_JA, std::max(a, 0.0), b, opt);
        std::vector<double> la;
        for (const Enclosure& e : na.eigenvalues) la.push_back(e.mid());
        std::vector<double> ja;
        for (const ZeroRecord& z : pos.zeros) ja.push_back(z.enc.mid());
        rep.measured["lambda_A"] = la;
        rep.measured["lambda_JA_positive"] = ja;

        auto in_open = [&](double lo, double hi) {
            return std::count_if(ja.begin(), ja.end(),
                                 [&](double x) { return x > lo && x < hi; });
        };
        const std::size_t n = la.size();
        bool i_vacuous = n < 2, ii_vacuous = n < 3;
        bool i_ok = true, ii_ok = true;
        for (std::size_t k = 1; 2 * k <= n; ++k) {  // pairs (l_{2k-1}, l_{2k})
            if (in_open(la[2 * k - 2], la[2 * k - 1]) != 1) i_ok = false;
            if (2 * k < n && in_open(la[2 * k - 1], la[2 * k]) != 0) i_ok = false;
        }
        for (std::size_t k = 1; 2 * k + 1 <= n; ++k) {  // pairs (l_{2k}, l_{2k+1})
            if (in_open(la[2 * k - 1], la[2 * k]) != 1) ii_ok = false;
            if (in_open(la[2 * k - 2], la[2 * k - 1]) != 0) ii_ok = false;
        }
        rep.measured["alternative_i"] = !i_vacuous && i_ok;
        rep.measured["alternative_ii"] = !ii_vacuous && ii_ok;

        bool ok;
        if (i_vacuous && ii_vacuous) {
            ok = true;  // nothing to interlace
            rep.reason = "vacuous (fewer than two eigenvalues of A)";
        } else {
            ok = (i_ok != ii_ok) || (i_ok && ii_vacuous) || (ii_ok && i_vacuous);
        }
        const auto top = prob.ess.lower_gap_top();
        const bool ground_case = !la.empty() && a < la.front() && (!top || b <= *top * (1 + 1e-12));
        if (ground_case && !i_vacuous && !i_ok) {
            ok = false;
            rep.reason = "gap contains min sigma(A) but the odd-indexed pairing failed";
        }
        rep.verdict = ok ? Verdict::holds : Verdict::violated;
        if (!ok && rep.reason.empty()) rep.reason = "no consistent pairing";
    } catch (const NoConvergence& e) {
        rep.verdict = Verdict::inconclusive;
        rep.reason = e.what();
    }
    return rep;
}

// Accumulation at a gap edge b in the essential spectrum: the counts of A and
// of JA near the edge pass any threshold N together (operationalized), or
// both stay finite and stable.
inline TheoremReport verify_accumulation(const WeylSolver& solver, double a, double b, long N,
                                         const ScanOptions& opt_in = {}) {
    TheoremReport rep = detail::base_report(solver, "accumulation", a, b);
    rep.bound = "n_A(a, b-) >= N iff n_JA(sym union, b-) >= N; both finite otherwise";
    const IndefiniteProblem& prob = solver.problem();
    ScanOptions opt = opt_in;
    opt.n_max = std::max(opt.n_max, 2 * N);

    const double delta = 1e-4 * std::max(1.0, std::fabs(b));
    const double bm = b - delta;
    const IntervalCount bp = count_in_interval_raw(prob, Side::plus, a, bm, solver.control(), opt.n_max);
    const IntervalCount bmn = count_in_interval_raw(prob, Side::minus, a, bm, solver.control(), opt.n_max);
    rep.measured["n_Bplus_near_edge"] = bp.count;
    rep.measured["n_Bminus_near_edge"] = bmn.count;
    rep.measured["stable_Bplus"] = bp.exact;
    rep.measured["stable_Bminus"] = bmn.exact;

    const bool runaway = !bp.exact || !bmn.exact || bp.count + bmn.count >= N;
    if (runaway) {
        // rank-one and alternation lower bounds transport the divergence to
        // n_A and to the zero count of the matching function
        const long n_A_lb = bp.count + bmn.count - 1;
        const long n_JA_lb = std::max(0L, bp.count - 1) + std::max(0L, bmn.count - 1);
        rep.measured["n_A_lower_bound"] = n_A_lb;
        rep.measured["n_JA_lower_bound"] = n_JA_lb;
        if (n_A_lb >= N && n_JA_lb >= N) {
            rep.verdict = Verdict::holds;
            rep.reason = "both counts exceed N near the edge";
        } else {
            rep.verdict = Verdict::inconclusive;
            rep.reason = "counts diverging but below N at the truncation ceiling";
        }
        return rep;
    }

    // finite regime: measure both sides exactly and check they agree as finite
    try {
        const CountReport na = eigenvalues_A(solver, a, bm, opt);
        const CountReport nja = eigenvalues_JA(solver, std::max(a, 0.0), bm, opt);
        rep.measured["n_A"] = na.count;
        rep.measured["n_JA_total"] = nja.count;
        const bool ok = std::labs(na.count - nja.count) <= 3;  // finite together, consistent
        rep.verdict = ok ? Verdict::holds : Verdict::violated;
        if (!ok) rep.reason = "finite counts inconsistent";
    } catch (const NoConvergence& e) {
        rep.verdict = Verdict::inconclusive;
        rep.reason = e.what();
    }
    return rep;
}

// Spectral gap of JA around zero: no zeros of the matching function in
// (-lambda_1, lambda_1), with the upper estimates on the first JA eigenvalues
// when the ground state is a zero of m+ - m-.
inline TheoremReport verify_gap(const WeylSolver& solver, const ScanOptions& opt = {}) {
    TheoremReport rep = detail::base_report(solver, "gap", 0.0, 0.0);
    rep.bound = "(-min sigma(A), min sigma(A)) contains no eigenvalue of JA";
    try {
        const GapReport g = gap_of_JA(solver, opt);
        rep.measured["has_discrete_ground"] = g.has_discrete_ground;
        rep.measured["lambda1_case"] = g.lambda1_case;
        if (g.has_discrete_ground) {
            rep.measured["lambda1"] = g.lambda1.mid();
            rep.a = -g.lambda1.mid();
            rep.b = g.lambda1.mid();
        }
        if (g.lambda1_plus_JA) rep.measured["lambda1_plus_JA"] = *g.lambda1_plus_JA;
        if (g.lambda1_minus_JA) rep.measured["lambda1_minus_JA"] = *g.lambda1_minus_JA;
        rep.measured["min_sigma_Bplus"] = g.min_sigma_Bplus;
        rep.measured["upper_bound_ok"] = g.upper_bound_ok;
        rep.verdict = (g.gap_free && g.upper_bound_ok) ? Verdict::holds : Verdict::violated;
        if (rep.verdict == Verdict::violated)
            rep.reason = g.gap_free ? "upper estimate failed" : "zero of M inside the gap";
    } catch (const NoConvergence& e) {
        rep.verdict = Verdict::inconclusive;
        rep.reason = e.what();
    }
    return rep;
}

inline nlohmann::json to_json(const TheoremReport& rep) {
    return {{"id", rep.id},
            {"problem_digest", rep.problem_digest},
            {"interval", {rep.a, rep.b}},
            {"measured", rep.measured},
            {"bound", rep.bound},
            {"verdict", to_string(rep.verdict)},
            {"reason", rep.reason}};
}

}  // namespace indefsl
