// Matching functions built from the half-line Weyl coefficients:
//
//   D(lambda) = m+(lambda) - m-(lambda)     zeros + common poles <-> eigenvalues
//                                           of the definite full-line operator A
//   M(lambda) = m+(lambda) - m-(-lambda)    zeros <-> eigenvalues of the
//                                           indefinite operator JA; poles <->
//                                           eigenvalues of JB = B+ (+) (-B-)
//
// Both are evaluated through the projective angles: the defect
// delta(lambda) = theta+ - theta- (mod pi) vanishes exactly at zeros, either
// angle at pi/2 flags a pole, and the scalar sign follows from the identity
// tan a - tan b = sin(a - b) / (cos a cos b) without ever dividing near a
// pole. On each positive (negative) half axis the scalar M is strictly
// increasing (decreasing) between consecutive poles, and zeros and poles
// strictly alternate; a scan that sees more than one sign change between
// poles therefore aborts as a numerics bug instead of guessing.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "indefsl/common.hpp"
#include "indefsl/spectral_count.hpp"
#include "indefsl/weyl.hpp"

namespace indefsl {

enum class MatchingKind { D_for_A, M_for_JA };

struct MatchValue {
    double lambda = 0.0;
    double theta_plus = 0.0;   // direction of m+(lambda)
    double theta_minus = 0.0;  // direction of m-(lambda) or m-(-lambda) per kind
    double value = 0.0;        // scalar D or M; huge near poles
    double delta = 0.0;        // projective defect in [0, pi/2]; 0 <=> zero
    bool pole_plus = false;
    bool pole_minus = false;
    int sign = 0;

    bool is_pole() const { return pole_plus || pole_minus; }
};

inline MatchValue eval_matching(const WeylSolver& solver, MatchingKind kind, double lambda,
                                double pole_angle_tol = 1e-7) {
    MatchValue mv;
    mv.lambda = lambda;
    const ProjectiveBoundaryValue pp = solver.m_plus(lambda);
    const ProjectiveBoundaryValue pm = (kind == MatchingKind::M_for_JA)
                                           ? solver.m_minus_reflected_arg(lambda)
                                           : solver.m_minus(lambda);
    mv.theta_plus = pp.theta;
    mv.theta_minus = pm.theta;
    mv.pole_plus = pp.is_pole(pole_angle_tol);
    mv.pole_minus = pm.is_pole(pole_angle_tol);
    mv.value = pp.scalar() - pm.scalar();
    mv.delta = proj_dist(pp.theta, pm.theta);
    mv.sign = sign_of(std::sin(pp.theta - pm.theta)) * sign_of(std::cos(pp.theta)) *
              sign_of(std::cos(pm.theta));
    return mv;
}

// ---------------------------------------------------------------------------
// Zero/pole scan of a matching function over an interval inside a gap.

struct ScanCell {
    double lo = 0.0, hi = 0.0;
    int sign_lo = 0, sign_hi = 0;
    bool pole_bounded_lo = false;  // cell edge sits next to a located pole
    bool pole_bounded_hi = false;
    int sign_changes = 0;
    bool monotone_ok = true;
};

struct ZeroRecord {
    Enclosure enc;
    double delta_mid = 0.0;  // projective defect at the enclosure midpoint
};

struct ZeroPoleScan {
    MatchingKind kind = MatchingKind::M_for_JA;
    double a = 0.0, b = 0.0;
    std::vector<ZeroRecord> zeros;   // sorted by position
    std::vector<Enclosure> poles;    // sorted
    std::vector<ScanCell> cells;     // bracketing certificates
    bool monotone_ok = true;

    std::vector<Enclosure> zero_enclosures() const {
        std::vector<Enclosure> out;
        out.reserve(zeros.size());
        for (const ZeroRecord& z : zeros) out.push_back(z.enc);
        return out;
    }
};

struct ScanOptions {
    int grid_per_cell = 64;
    double zero_tol = 1e-6;        // enclosure half-width target for zeros
    double pole_tol = 1e-6;        // enclosure tolerance for pole location
    double pole_angle_tol = 1e-7;  // angle distance to pi/2 that flags a pole
    double ess_guard = 1e-2;       // scan standoff from essential-spectrum edges;
                                   // Weyl convergence needs exp(-2 sqrt(guard) X)
                                   // to pass angle_tol within the truncation ladder
    long n_max = 64;
};

namespace detail {

// Poles of the matching function inside (a,b): eigenvalues of B+ on the
// positive axis and of -B- (kind M) or B- (kind D) as appropriate.
inline std::vector<Enclosure> matching_poles(const WeylSolver& solver, MatchingKind kind, double a,
                                             double b, const ScanOptions& opt) {
    std::vector<Enclosure> poles;
    auto add = [&](std::vector<Enclosure> v) {
        poles.insert(poles.end(), v.begin(), v.end());
    };
    if (kind == MatchingKind::M_for_JA) {
        if (b > 0.0)
            add(locate_eigenvalues(solver, {Side::plus, +1}, std::max(a, 0.0), b, opt.pole_tol,
                                   opt.n_max));
        if (a < 0.0)
            add(locate_eigenvalues(solver, {Side::minus, -1}, a, std::min(b, 0.0), opt.pole_tol,
                                   opt.n_max));
    } else {
        add(locate_eigenvalues(solver, {Side::plus, +1}, a, b, opt.pole_tol, opt.n_max));
        add(locate_eigenvalues(solver, {Side::minus, +1}, a, b, opt.pole_tol, opt.n_max));
    }
    std::sort(poles.begin(), poles.end(),
              [](const Enclosure& x, const Enclosure& y) { return x.lo < y.lo; });
    return poles;
}

// Merge poles whose enclosures (nearly) coincide; used by the A route where a
// simultaneous pole of m+ and m- is itself an eigenvalue of A.
inline std::vector<Enclosure> merge_coincident(const std::vector<Enclosure>& sorted, double scale,
                                               std::vector<Enclosure>* merged_out) {
    std::vector<Enclosure> out;
    const double tol = 1e-9 * std::max(1.0, scale);
    for (const Enclosure& e : sorted) {
        if (!out.empty()) {
            Enclosure& last = out.back();
            const double gap = e.mid() - last.mid();
            if (gap <= std::max(2.0 * (last.radius() + e.radius()), tol)) {
                if (merged_out) merged_out->push_back({last.lo, e.hi});
                last.lo = std::min(last.lo, e.lo);
                last.hi = std::max(last.hi, e.hi);
                continue;
            }
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace detail

inline ZeroPoleScan scan(const WeylSolver& solver, MatchingKind kind, double a, double b,
                         const ScanOptions& opt = {},
                         const std::vector<Enclosure>* poles_override = nullptr) {
    if (!(a < b)) throw Error("scan: need a < b");
    ZeroPoleScan out;
    out.kind = kind;
    // intervals may legally touch the essential spectrum at their endpoints;
    // the evaluated grid keeps the convergence standoff
    const IndefiniteProblem& prob = solver.problem();
    a = prob.ess.clamp_lo(a, opt.ess_guard);
    b = prob.ess.clamp_hi(b, opt.ess_guard);
    out.a = a;
    out.b = b;
    if (!(a < b)) return out;
    out.poles = poles_override ? *poles_override : detail::matching_poles(solver, kind, a, b, opt);

    // cell boundaries: interval ends, pole offsets, and a split at 0 where the
    // monotonicity sense of M flips
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    const double eps = 1e-9 * scale;
    struct Edge {
        double x;
        bool from_pole;
    };
    std::vector<Edge> edges{{a + eps, false}};
    for (const Enclosure& p : out.poles) {
        const double off = std::max(4.0 * p.radius(), 1e-7 * scale);
        edges.push_back({p.mid() - off, true});
        edges.push_back({p.mid() + off, true});
    }
    if (a < 0.0 && b > 0.0) edges.push_back({0.0, false});
    edges.push_back({b - eps, false});
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.x < y.x; });

    auto eval = [&](double lam) { return eval_matching(solver, kind, lam, opt.pole_angle_tol); };

    for (std::size_t i = 0; i + 1 < edges.size(); i += 1) {
        const double lo = edges[i].x, hi = edges[i + 1].x;
        if (!(hi - lo > eps)) continue;
        // skip the slot that covers a pole (between its two offset edges)
        bool covers_pole = false;
        for (const Enclosure& p : out.poles)
            if (p.mid() > lo && p.mid() < hi) covers_pole = true;
        if (covers_pole) continue;

        ScanCell cell;
        cell.lo = lo;
        cell.hi = hi;
        cell.pole_bounded_lo = edges[i].from_pole;
        cell.pole_bounded_hi = edges[i + 1].from_pole;

        const int n = std::max(2, opt.grid_per_cell);
        std::vector<MatchValue> samples;
        samples.reserve(n + 1);
        for (int k = 0; k <= n; ++k) samples.push_back(eval(lo + (hi - lo) * k / n));
        cell.sign_lo = samples.front().sign;
        cell.sign_hi = samples.back().sign;

        // monotone audit: M increases on R+, decreases on R-; D increases
        const bool increasing = (kind == MatchingKind::D_for_A) || lo >= 0.0;
        for (int k = 0; k + 1 <= n; ++k) {
            const double dv = samples[k + 1].value - samples[k].value;
            if ((increasing && dv <= 0.0) || (!increasing && dv >= 0.0)) cell.monotone_ok = false;
        }
        out.monotone_ok = out.monotone_ok && cell.monotone_ok;

        // sign changes on the grid
        int changes = 0;
        int last_sign = samples.front().sign;
        double bracket_lo = lo, bracket_hi = hi;
        for (int k = 1; k <= n; ++k) {
            const int s = samples[k].sign;
            if (s != 0 && last_sign != 0 && s != last_sign) {
                ++changes;
                bracket_lo = lo + (hi - lo) * (k - 1) / n;
                bracket_hi = lo + (hi - lo) * k / n;
            }
            if (s != 0) last_sign = s;
        }
        cell.sign_changes = changes;
        if (changes > 1)
            throw AlternationViolation(
                "more than one sign change between consecutive poles in [" + std::to_string(lo) +
                ", " + std::to_string(hi) + "]; tolerance failure");
        if (changes == 0 && cell.pole_bounded_lo && cell.pole_bounded_hi)
            throw AlternationViolation("no zero between consecutive poles in [" +
                                       std::to_string(lo) + ", " + std::to_string(hi) + "]");

        if (changes == 1) {
            double zl = bracket_lo, zh = bracket_hi;
            int sl = eval(zl).sign;
            while (zh - zl > 2.0 * opt.zero_tol) {
                const double mid = 0.5 * (zl + zh);
                const MatchValue mm = eval(mid);
                if (mm.sign == 0) {
                    zl = mid - opt.zero_tol;
                    zh = mid + opt.zero_tol;
                    break;
                }
                if (mm.sign == sl)
                    zl = mid;
                else
                    zh = mid;
            }
            ZeroRecord zr;
            zr.enc = {zl, zh};
            const MatchValue mm = eval(zr.enc.mid());
            zr.delta_mid = mm.delta;
            if (mm.is_pole())
                throw AlternationViolation("sign change at lambda = " + std::to_string(zr.enc.mid()) +
                                           " resolves to a pole; pole localization too coarse");
            out.zeros.push_back(zr);
        }
        out.cells.push_back(cell);
    }
    std::sort(out.zeros.begin(), out.zeros.end(),
              [](const ZeroRecord& x, const ZeroRecord& y) { return x.enc.lo < y.enc.lo; });
    return out;
}

// ---------------------------------------------------------------------------
// Eigenvalues of JA in the symmetric union (-b,-a) u (a,b): zeros of M.

inline CountReport eigenvalues_JA(const WeylSolver& solver, double a, double b,
                                  const ScanOptions& opt = {}) {
    if (!(0.0 <= a && a < b)) throw Error("eigenvalues_JA: need 0 <= a < b");
    const IndefiniteProblem& prob = solver.problem();
    const double eps = detail::endpoint_eps(a, b);
    if (!prob.ess.clear_of_ess(b - eps, 0.0))
        throw EssentialSpectrumProximity("eigenvalues_JA: (a,b) meets the declared essential spectrum");

    CountReport rep;
    rep.op = "JA";
    rep.a = a;
    rep.b = b;
    const ZeroPoleScan neg = scan(solver, MatchingKind::M_for_JA, -b, -a, opt);
    const ZeroPoleScan pos = scan(solver, MatchingKind::M_for_JA, a, b, opt);
    for (const ZeroRecord& z : neg.zeros) rep.eigenvalues.push_back(z.enc);
    for (const ZeroRecord& z : pos.zeros) rep.eigenvalues.push_back(z.enc);
    rep.count = static_cast<long>(rep.eigenvalues.size());
    rep.extra["count_negative"] = neg.zeros.size();
    rep.extra["count_positive"] = pos.zeros.size();
    rep.extra["monotone_ok"] = neg.monotone_ok && pos.monotone_ok;
    rep.x_used = prob.trunc.x_max;

    if (prob.symmetric) {
        bool paired = neg.zeros.size() == pos.zeros.size();
        if (paired) {
            const double pair_tol = std::max(10.0 * opt.zero_tol, 1e-6);
            for (std::size_t i = 0; i < pos.zeros.size(); ++i) {
                const double mirror = -neg.zeros[neg.zeros.size() - 1 - i].enc.mid();
                if (std::fabs(pos.zeros[i].enc.mid() - mirror) > pair_tol) paired = false;
            }
        }
        rep.extra["symmetric_pairing_ok"] = paired;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Eigenvalues of A in (a,b): zeros of D plus simultaneous poles of m+ and m-.

inline CountReport eigenvalues_A(const WeylSolver& solver, double a, double b,
                                 const ScanOptions& opt = {}) {
    if (!(a < b)) throw Error("eigenvalues_A: need a < b");
    const IndefiniteProblem& prob = solver.problem();
    const double eps = detail::endpoint_eps(a, b);
    if (!prob.ess.clear_of_ess(b - eps, 0.0))
        throw EssentialSpectrumProximity("eigenvalues_A: (a,b) meets the declared essential spectrum");

    const auto pplus = locate_eigenvalues(solver, {Side::plus, +1}, a, b, opt.pole_tol, opt.n_max);
    const auto pminus = locate_eigenvalues(solver, {Side::minus, +1}, a, b, opt.pole_tol, opt.n_max);

    std::vector<Enclosure> all = pplus;
    all.insert(all.end(), pminus.begin(), pminus.end());
    std::sort(all.begin(), all.end(),
              [](const Enclosure& x, const Enclosure& y) { return x.lo < y.lo; });
    std::vector<Enclosure> common;
    const std::vector<Enclosure> poles =
        detail::merge_coincident(all, std::max(std::fabs(a), std::fabs(b)), &common);

    const ZeroPoleScan sc = scan(solver, MatchingKind::D_for_A, a, b, opt, &poles);

    CountReport rep;
    rep.op = "A";
    rep.a = a;
    rep.b = b;
    rep.eigenvalues = sc.zero_enclosures();
    for (const Enclosure& e : common) rep.eigenvalues.push_back(e);
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const Enclosure& x, const Enclosure& y) { return x.lo < y.lo; });
    rep.count = static_cast<long>(rep.eigenvalues.size());
    rep.extra["zeros_of_difference"] = sc.zeros.size();
    rep.extra["common_poles"] = common.size();
    rep.extra["n_Bplus"] = pplus.size();
    rep.extra["n_Bminus"] = pminus.size();
    rep.extra["monotone_ok"] = sc.monotone_ok;
    rep.x_used = prob.trunc.x_max;
    return rep;
}

// ---------------------------------------------------------------------------
// Spectral gap of JA around zero.

struct GapReport {
    bool has_discrete_ground = false;  // A has an eigenvalue below its essential spectrum
    Enclosure lambda1;                 // smallest eigenvalue of A, when present
    std::string lambda1_case;          // "zero_of_m_difference" | "common_pole" | "none"
    bool gap_free = false;             // no zeros of M in (-lambda1, lambda1)
    std::optional<double> lambda1_plus_JA;   // smallest positive eigenvalue of JA
    std::optional<double> lambda1_minus_JA;  // largest negative eigenvalue of JA
    double min_sigma_Bplus = 0.0;            // smallest B+ eigenvalue (or gap top)
    double min_sigma_Bminus = 0.0;
    bool upper_bound_ok = true;  // lambda1_plus < min sigma(B+) etc., when applicable
};

inline GapReport gap_of_JA(const WeylSolver& solver, const ScanOptions& opt = {}) {
    const IndefiniteProblem& prob = solver.problem();
    const auto top_opt = prob.ess.lower_gap_top();
    if (!top_opt)
        throw Error("gap_of_JA: essential spectrum model declares no gap below the spectrum");
    const double top = *top_opt;
    const double eps = 1e-6 * std::max(1.0, top);

    GapReport rep;
    const CountReport a_low = eigenvalues_A(solver, eps, top - eps, opt);
    rep.has_discrete_ground = a_low.count > 0;

    const auto pplus = locate_eigenvalues(solver, {Side::plus, +1}, eps, top - eps, opt.pole_tol);
    const auto pminus = locate_eigenvalues(solver, {Side::minus, +1}, eps, top - eps, opt.pole_tol);
    rep.min_sigma_Bplus = pplus.empty() ? top : pplus.front().mid();
    rep.min_sigma_Bminus = pminus.empty() ? top : pminus.front().mid();

    if (!rep.has_discrete_ground) {
        rep.lambda1_case = "none";
        const ZeroPoleScan sc = scan(solver, MatchingKind::M_for_JA, -top + eps, top - eps, opt);
        rep.gap_free = sc.zeros.empty();
        return rep;
    }

    rep.lambda1 = a_low.eigenvalues.front();
    const double l1 = rep.lambda1.mid();
    const double off = std::max(4.0 * rep.lambda1.radius(), eps);
    const bool common =
        !pplus.empty() && std::fabs(pplus.front().mid() - l1) <= std::max(off, 1e-6);
    rep.lambda1_case = common ? "common_pole" : "zero_of_m_difference";

    const ZeroPoleScan inner = scan(solver, MatchingKind::M_for_JA, -l1 + off, l1 - off, opt);
    rep.gap_free = inner.zeros.empty();

    const ZeroPoleScan up = scan(solver, MatchingKind::M_for_JA, l1 - off, top - eps, opt);
    if (!up.zeros.empty()) rep.lambda1_plus_JA = up.zeros.front().enc.mid();
    const ZeroPoleScan down = scan(solver, MatchingKind::M_for_JA, -top + eps, -l1 + off, opt);
    if (!down.zeros.empty()) rep.lambda1_minus_JA = down.zeros.back().enc.mid();

    if (rep.lambda1_case == "zero_of_m_difference") {
        if (rep.lambda1_plus_JA && !(*rep.lambda1_plus_JA < rep.min_sigma_Bplus))
            rep.upper_bound_ok = false;
        if (rep.lambda1_minus_JA && !(*rep.lambda1_minus_JA > -rep.min_sigma_Bminus))
            rep.upper_bound_ok = false;
    }
    return rep;
}

}  // namespace indefsl
