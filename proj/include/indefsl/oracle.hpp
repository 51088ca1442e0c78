// Independent finite-difference oracle for cross-validation.
//
// The divergence form -(pu')' + qu is discretized with central differences
// and midpoint p-values on a uniform Dirichlet grid; both sides of the
// discrete pencil are scaled by the grid step h so that
//
//     T v = lambda R v,     T = h * [stencil + q],   R = diag(r(x_i) h).
//
// In the left-definite regime T is positive definite, so the pencil is
// reduced by the reciprocal Cholesky trick: T = L L^T, S = L^{-1} R L^{-T},
// eigenvalues mu of the symmetric S give lambda = 1/mu. Every matrix in the
// chain is symmetric, which certifies realness of the oracle spectrum
// structurally. Dense O(n^3) at desk scale; the definite operators (A, B+,
// B-, periodic) reduce to symmetric tridiagonal problems instead.
#pragma once

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "indefsl/coefficients.hpp"
#include "indefsl/common.hpp"
#include "indefsl/spectral_count.hpp"

namespace indefsl {

struct Pencil {
    int n = 0;
    double X = 0.0, h = 0.0;
    std::vector<double> tdiag, toff;  // T, symmetric tridiagonal (toff has n-1 entries)
    std::vector<double> rdiag;        // R, diagonal
    std::vector<double> nodes;
    std::vector<double> chol_d, chol_e;  // bidiagonal Cholesky factor of T
    bool n_adjusted = false;             // grid bumped to keep nodes off c
};

namespace detail {

// Bidiagonal Cholesky of a symmetric tridiagonal matrix; throws when a pivot
// fails, which is exactly the left-definiteness check.
inline void tridiag_cholesky(const std::vector<double>& d, const std::vector<double>& e,
                             std::vector<double>& l, std::vector<double>& m) {
    const std::size_t n = d.size();
    l.assign(n, 0.0);
    m.assign(n > 0 ? n - 1 : 0, 0.0);
    double prev_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pivot = d[i] - prev_m * prev_m;
        if (!(pivot > 0.0))
            throw NonPositiveDefiniteT("discretized form lost positive definiteness at row " +
                                       std::to_string(i));
        l[i] = std::sqrt(pivot);
        if (i + 1 < n) {
            m[i] = e[i] / l[i];
            prev_m = m[i];
        }
    }
}

inline std::vector<double> tridiag_eigenvalues(std::vector<double> diag, std::vector<double> off) {
    const lapack_int n = static_cast<lapack_int>(diag.size());
    const lapack_int info = LAPACKE_dsterf(n, diag.data(), off.data());
    if (info != 0) throw FactorizationFailure("dsterf failed with info " + std::to_string(info));
    return diag;
}

inline std::vector<double> dense_sym_eigenvalues(std::vector<double>& a, int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
    if (info != 0) throw FactorizationFailure("dsyevd failed with info " + std::to_string(info));
    return w;
}

struct TridiagForm {
    std::vector<double> tdiag, toff, weight, nodes;
    double h = 0.0;
};

// Dirichlet stencil of -(pu')' + qu on nodes lo + i*h, i = 1..n, h-scaled.
inline TridiagForm dirichlet_form(const IndefiniteProblem& prob, double lo, double hi, int n) {
    TridiagForm f;
    f.h = (hi - lo) / (n + 1);
    f.tdiag.resize(n);
    f.toff.resize(n - 1);
    f.nodes.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = lo + (i + 1) * f.h;
        f.nodes[i] = x;
        const double pl = prob.p(x - 0.5 * f.h);
        const double pr = prob.p(x + 0.5 * f.h);
        f.tdiag[i] = (pl + pr) / f.h + prob.q(x) * f.h;
        if (i + 1 < n) f.toff[i] = -pr / f.h;
    }
    return f;
}

}  // namespace detail

// Full-line pencil with the signed weight r.
inline Pencil discretize(const IndefiniteProblem& prob, double X, int n) {
    if (n < 16) throw Error("discretize: need n >= 16");
    if (!(X > 0.0)) throw Error("discretize: need X > 0");
    Pencil pc;
    if (n % 2 == 1) {  // odd n puts a node exactly on c where sgn r vanishes
        ++n;
        pc.n_adjusted = true;
    }
    pc.n = n;
    pc.X = X;
    auto f = detail::dirichlet_form(prob, prob.c - X, prob.c + X, n);
    pc.h = f.h;
    pc.tdiag = std::move(f.tdiag);
    pc.toff = std::move(f.toff);
    pc.nodes = std::move(f.nodes);
    pc.rdiag.resize(n);
    for (int i = 0; i < n; ++i) {
        pc.rdiag[i] = prob.r(pc.nodes[i]) * pc.h;
        const int want = sign_of(pc.nodes[i] - prob.c);
        if (sign_of(pc.rdiag[i]) != want || want == 0)
            throw SignPatternViolation("oracle grid: r sign at node " + std::to_string(pc.nodes[i]) +
                                       " violates the declared sign change");
    }
    detail::tridiag_cholesky(pc.tdiag, pc.toff, pc.chol_d, pc.chol_e);
    return pc;
}

// All pencil eigenvalues (spectrum of the discretized indefinite operator),
// sorted ascending. Real by construction of the symmetric reduction.
inline std::vector<double> pencil_eigenvalues(const Pencil& pc) {
    const int n = pc.n;
    const std::vector<double>& l = pc.chol_d;
    const std::vector<double>& e = pc.chol_e;
    std::vector<double> s(static_cast<std::size_t>(n) * n, 0.0);
    // column j of Y = L^{-1} R: forward substitution against a single spike
    for (int j = 0; j < n; ++j) {
        double* col = s.data() + static_cast<std::size_t>(j) * n;
        col[j] = pc.rdiag[j] / l[j];
        for (int i = j + 1; i < n; ++i) col[i] = -e[i - 1] * col[i - 1] / l[i];
    }
    // rows of S from S L^T = Y (in place)
    for (int i = 0; i < n; ++i) {
        double prev = 0.0;
        for (int j = 0; j < n; ++j) {
            double& sij = s[static_cast<std::size_t>(j) * n + i];
            sij = (sij - (j > 0 ? e[j - 1] * prev : 0.0)) / l[j];
            prev = sij;
        }
    }
    // symmetrize rounding noise
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double& a = s[static_cast<std::size_t>(j) * n + i];
            double& b = s[static_cast<std::size_t>(i) * n + j];
            const double m = 0.5 * (a + b);
            a = m;
            b = m;
        }
    const std::vector<double> mu = detail::dense_sym_eigenvalues(s, n);
    std::vector<double> lam;
    lam.reserve(mu.size());
    for (double m : mu)
        if (std::fabs(m) > 1e-300) lam.push_back(1.0 / m);
    std::sort(lam.begin(), lam.end());
    return lam;
}

// Definite operators: symmetric tridiagonal reduction with weight |r|.
enum class OracleOp { A, JA, Bplus, Bminus, BminusNeg, B, JB };

inline OracleOp oracle_op_from_tag(const std::string& tag) {
    if (tag == "A") return OracleOp::A;
    if (tag == "JA") return OracleOp::JA;
    if (tag == "Bplus") return OracleOp::Bplus;
    if (tag == "Bminus") return OracleOp::Bminus;
    if (tag == "BminusNeg") return OracleOp::BminusNeg;
    if (tag == "B") return OracleOp::B;
    if (tag == "JB") return OracleOp::JB;
    throw Error("unknown operator tag '" + tag + "'");
}

namespace detail {

inline std::vector<double> definite_eigs(const IndefiniteProblem& prob, double lo, double hi,
                                         int n) {
    TridiagForm f = dirichlet_form(prob, lo, hi, n);
    std::vector<double> d(n), e(n - 1);
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        w[i] = prob.abs_r(f.nodes[i]) * f.h;
        if (!(w[i] > 0.0))
            throw Error("oracle grid: |r| vanished at node " + std::to_string(f.nodes[i]));
        d[i] = f.tdiag[i] / w[i];
    }
    for (int i = 0; i + 1 < n; ++i) e[i] = f.toff[i] / std::sqrt(w[i] * w[i + 1]);
    return tridiag_eigenvalues(std::move(d), std::move(e));
}

}  // namespace detail

// Full-line definite operator A on (c-X, c+X), Dirichlet cutoffs.
inline std::vector<double> oracle_A_eigenvalues(const IndefiniteProblem& prob, double X, int n) {
    if (n % 2 == 1) ++n;  // keep nodes off c, as in discretize
    return detail::definite_eigs(prob, prob.c - X, prob.c + X, n);
}

inline std::vector<double> oracle_halfline_eigenvalues(const IndefiniteProblem& prob, Side side,
                                                       double X, int n) {
    if (side == Side::plus) return detail::definite_eigs(prob, prob.c, prob.c + X, n);
    return detail::definite_eigs(prob, prob.c - X, prob.c, n);
}

// Periodic / antiperiodic eigenvalues over one period (s = +1 / -1), used as
// the band-edge oracle. Cell-centered nodes keep the grid off c.
inline std::vector<double> oracle_periodic_eigenvalues(const IndefiniteProblem& prob, int n,
                                                       int s) {
    if (prob.ess.variant != EssentialSpectrumModel::Variant::PeriodicBands)
        throw Error("periodic oracle: problem has no declared period");
    const double gamma = prob.ess.period;
    const double h = gamma / n;
    std::vector<double> x(n), pe(n + 1), w(n);
    for (int i = 0; i < n; ++i) x[i] = prob.c + (i + 0.5) * h;
    for (int i = 0; i <= n; ++i) pe[i] = prob.p(prob.c + i * h);
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(j) * n + i]; };
    for (int i = 0; i < n; ++i) {
        w[i] = prob.abs_r(x[i]) * h;
        if (!(w[i] > 0.0)) throw Error("periodic oracle: |r| vanished at a node");
        at(i, i) = (pe[i] + pe[i + 1]) / h + prob.q(x[i]) * h;
        if (i + 1 < n) {
            at(i, i + 1) = -pe[i + 1] / h;
            at(i + 1, i) = -pe[i + 1] / h;
        }
    }
    const double corner = -static_cast<double>(s) * pe[0] / h;
    at(0, n - 1) += corner;
    at(n - 1, 0) += corner;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) at(i, j) /= std::sqrt(w[i] * w[j]);
    return detail::dense_sym_eigenvalues(a, n);
}

// Count + list eigenvalues of the requested operator in an interval. For JA
// and JB the interval denotes the symmetric union (-b,-a) u (a,b).
inline CountReport oracle_counts(const IndefiniteProblem& prob, OracleOp op, double a, double b,
                                 double X, int n) {
    CountReport rep;
    rep.a = a;
    rep.b = b;
    rep.x_used = X;
    rep.converged = true;

    auto collect = [&](const std::vector<double>& eigs, double lo, double hi) {
        for (double ev : eigs)
            if (ev > lo && ev < hi) rep.eigenvalues.push_back({ev, ev});
    };

    switch (op) {
        case OracleOp::A:
            rep.op = "A";
            collect(oracle_A_eigenvalues(prob, X, n), a, b);
            break;
        case OracleOp::JA: {
            rep.op = "JA";
            const auto eigs = pencil_eigenvalues(discretize(prob, X, n));
            collect(eigs, -b, -a);
            collect(eigs, a, b);
            break;
        }
        case OracleOp::Bplus:
            rep.op = "Bplus";
            collect(oracle_halfline_eigenvalues(prob, Side::plus, X, n), a, b);
            break;
        case OracleOp::Bminus:
            rep.op = "Bminus";
            collect(oracle_halfline_eigenvalues(prob, Side::minus, X, n), a, b);
            break;
        case OracleOp::BminusNeg: {
            rep.op = "BminusNeg";
            auto eigs = oracle_halfline_eigenvalues(prob, Side::minus, X, n);
            for (double& ev : eigs) ev = -ev;
            std::sort(eigs.begin(), eigs.end());
            collect(eigs, a, b);
            break;
        }
        case OracleOp::B: {
            rep.op = "B";
            collect(oracle_halfline_eigenvalues(prob, Side::plus, X, n), a, b);
            collect(oracle_halfline_eigenvalues(prob, Side::minus, X, n), a, b);
            break;
        }
        case OracleOp::JB: {
            rep.op = "JB";
            auto neg = oracle_halfline_eigenvalues(prob, Side::minus, X, n);
            for (double& ev : neg) ev = -ev;
            collect(neg, -b, -a);
            collect(oracle_halfline_eigenvalues(prob, Side::plus, X, n), a, b);
            break;
        }
    }
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const Enclosure& x, const Enclosure& y) { return x.lo < y.lo; });
    rep.count = static_cast<long>(rep.eigenvalues.size());
    return rep;
}

}  // namespace indefsl
