// Half-line Titchmarsh-Weyl coefficients m+ and m- in a pole-robust
// projective representation.
//
// m+(lambda) is the ratio (p h')(c) / h(c) of the unique square-integrable
// solution of the right half-line equation; m-(mu) the analogue on the left.
// The primitive object here is the direction angle theta = atan2(v, u) of
// (h(c), (p h')(c)) reduced mod pi: m = tan(theta), with theta = pi/2 exactly
// at poles of m, i.e. at Dirichlet eigenvalues of the half-line operator.
// Poles are therefore never produced by dividing.
//
// Evaluation is by backward shooting: Dirichlet data (u, v) = (0, 1) at the
// truncation point +-X, integrated to c. In the limit point case every
// selfadjoint cutoff condition yields the same limit; convergence is
// monitored by repeating with X grown per the truncation policy until the
// angle moves by less than the policy tolerance.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <unordered_map>

#include "indefsl/coefficients.hpp"
#include "indefsl/common.hpp"
#include "indefsl/ode.hpp"

namespace indefsl {

struct ProjectiveBoundaryValue {
    double theta = 0.0;           // direction of (h(c), (p h')(c)) in [0, pi)
    double error_estimate = 0.0;  // projective angle change on the last X growth
    double x_used = 0.0;
    bool converged = false;

    bool is_pole(double angle_tol = 1e-7) const {
        return std::fabs(theta - pi / 2.0) <= angle_tol;
    }
    // v/u ratio of the (cos theta, sin theta) representative; +-huge at poles
    double scalar() const { return std::tan(theta); }
    double cos_dir() const { return std::cos(theta); }
};

class WeylSolver {
  public:
    explicit WeylSolver(const IndefiniteProblem& prob, IntegrationControl ctrl = {},
                        double ess_margin = 1e-6)
        : prob_(&prob), ctrl_(ctrl), ess_margin_(ess_margin) {}

    const IndefiniteProblem& problem() const { return *prob_; }
    const IntegrationControl& control() const { return ctrl_; }
    double ess_margin() const { return ess_margin_; }

    // m+ : right half line, equation -(ph')' + qh = lambda r+ h
    ProjectiveBoundaryValue m_plus(double lambda) const { return eval(Side::plus, lambda); }

    // m- : left half line, equation -(pk')' + qk = mu |r-| k
    ProjectiveBoundaryValue m_minus(double mu) const { return eval(Side::minus, mu); }

    // Direction of lambda -> m-(-lambda), the left Weyl coefficient as it
    // enters the full-line matching function.
    ProjectiveBoundaryValue m_minus_reflected_arg(double lambda) const {
        return eval(Side::minus, -lambda);
    }

  private:
    ProjectiveBoundaryValue eval(Side side, double lambda) const {
        if (!prob_->ess.clear_of_ess(lambda, ess_margin_))
            throw EssentialSpectrumProximity(
                "lambda = " + std::to_string(lambda) +
                " is within the declared essential spectrum margin");

        Cache& cache = (side == Side::plus) ? plus_ : minus_;
        const std::uint64_t key = std::bit_cast<std::uint64_t>(lambda);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache.find(key);
            if (it != cache.end()) return it->second;
        }
        ProjectiveBoundaryValue out = shoot(side, lambda);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            cache.emplace(key, out);  // idempotent: equal keys give equal values
        }
        return out;
    }

    ProjectiveBoundaryValue shoot(Side side, double lambda) const {
        const TruncationPolicy& tp = prob_->trunc;
        const double dir = (side == Side::plus) ? 1.0 : -1.0;
        SLEquation eq{prob_, lambda, +1};

        ProjectiveBoundaryValue out;
        bool have_prev = false;
        double theta_prev = 0.0;
        for (double X = tp.x0; X <= tp.x_max * (1.0 + 1e-12); X *= tp.growth) {
            const SLState start{prob_->c + dir * X, 0.0, 1.0};
            const SLState at_c = integrate_to(eq, start, prob_->c, ctrl_).state;
            const double theta = mod_pi(std::atan2(at_c.v, at_c.u));
            if (have_prev) {
                const double d = proj_dist(theta, theta_prev);
                out.error_estimate = d;
                if (d < tp.angle_tol) {
                    out.theta = theta;
                    out.x_used = X;
                    out.converged = true;
                    return out;
                }
            }
            theta_prev = theta;
            have_prev = true;
            out.theta = theta;
            out.x_used = X;
        }
        throw NoConvergence("Weyl angle not Cauchy under truncation growth up to X = " +
                            std::to_string(tp.x_max) + " at lambda = " + std::to_string(lambda) +
                            " (last change " + std::to_string(out.error_estimate) + ")");
    }

    const IndefiniteProblem* prob_;
    IntegrationControl ctrl_;
    double ess_margin_;

    using Cache = std::unordered_map<std::uint64_t, ProjectiveBoundaryValue>;
    mutable std::mutex mutex_;
    mutable Cache plus_, minus_;
};

}  // namespace indefsl
