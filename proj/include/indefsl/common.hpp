// Shared error types and small numeric helpers.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace indefsl {

inline constexpr double pi = 3.14159265358979323846;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// problem construction / validation
struct ParseError : Error { using Error::Error; };
struct SignPatternViolation : Error { using Error::Error; };
struct NonpositiveP : Error { using Error::Error; };
struct SymmetryDeclaredButViolated : Error { using Error::Error; };

// integration
struct StepUnderflow : Error { using Error::Error; };
struct NonfiniteState : Error { using Error::Error; };

// Weyl coefficients / counting
struct NoConvergence : Error { using Error::Error; };
struct EssentialSpectrumProximity : Error { using Error::Error; };
struct BisectionStall : Error { using Error::Error; };

// matching / band structure
struct AlternationViolation : Error { using Error::Error; };
struct InterleavingViolation : Error { using Error::Error; };

// oracle
struct NonPositiveDefiniteT : Error { using Error::Error; };
struct FactorizationFailure : Error { using Error::Error; };

// Wrap an angle difference into (-pi, pi].
inline double wrap_pm_pi(double a) {
    a = std::fmod(a, 2.0 * pi);
    if (a > pi) a -= 2.0 * pi;
    if (a <= -pi) a += 2.0 * pi;
    return a;
}

// Normalize a direction angle into [0, pi) (projective line representative).
inline double mod_pi(double a) {
    a = std::fmod(a, pi);
    if (a < 0.0) a += pi;
    if (a >= pi) a -= pi;   // fmod can return exactly pi after the += above
    return a;
}

// Projective distance between two directions, in [0, pi/2].
inline double proj_dist(double a, double b) {
    double d = std::fabs(mod_pi(a) - mod_pi(b));
    return std::min(d, pi - d);
}

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// FNV-1a 64-bit, used for problem content digests.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex_digest(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

// Deterministic uniform draw in [lo, hi) from a 64-bit generator state,
// independent of the standard library's distribution implementation.
template <class Rng>
double uniform(Rng& rng, double lo, double hi) {
    const double u = std::ldexp(static_cast<double>(rng() >> 11), -53);
    return lo + u * (hi - lo);
}

}  // namespace indefsl
