#pragma once
// Gaussian analytics: upper-tail probabilities, the classical tail sandwich,
// absolute moments E|xi|^q, and an adaptive Gauss-Kronrod integrator used as
// the quadrature backend for Bayes-risk evaluations.
//
// Tail probabilities are evaluated through erfc rather than 1 - CDF; the
// rate functions probe tails at arguments around 6-8 sigma where the naive
// form loses all precision.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smse::gauss {

inline constexpr double kQuadTol = 1e-10;        // default quadrature tolerance
inline constexpr double kTruncationSigmas = 10.0; // cut for Gaussian-weight integrals

// Thrown when the adaptive integrator exhausts its refinement budget.
// Carries the best estimate so callers can inspect how far it got.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, double best_estimate, double error_bound)
        : std::runtime_error(what), best_(best_estimate), bound_(error_bound) {}
    double best_estimate() const noexcept { return best_; }
    double error_bound() const noexcept { return bound_; }

private:
    double best_;
    double bound_;
};

// P(eps > y) for standard Gaussian eps.
inline double upper_tail(double y) noexcept {
    return 0.5 * std::erfc(y * std::numbers::sqrt2 / 2.0);
}

// Standard normal density.
inline double density(double x) noexcept {
    return std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
}

struct TailBoundPair {
    double lower;
    double exact;
    double upper;
};

// e^{-y^2/2}/(sqrt(2 pi) y + 4)  <=  P(eps > y)  <=  e^{-y^2/2}/(sqrt(2 pi) y v 2),
// valid for y >= 0.
inline TailBoundPair tail_sandwich(double y) {
    if (!(y >= 0.0))
        throw std::invalid_argument("tail_sandwich: y must be >= 0");
    const double sq2pi = std::sqrt(2.0 * std::numbers::pi);
    const double e = std::exp(-0.5 * y * y);
    return TailBoundPair{
        e / (sq2pi * y + 4.0),
        upper_tail(y),
        e / std::max(sq2pi * y, 2.0),
    };
}

// sigma_q^q = E|xi|^q for xi ~ N(0, sigma^2), via
// sigma^q 2^{q/2} Gamma((q+1)/2) / sqrt(pi).
inline double abs_moment_pow(double q, double sigma) {
    if (!(q >= 1.0))
        throw std::invalid_argument("abs_moment_pow: q must be >= 1");
    if (!(sigma > 0.0))
        throw std::invalid_argument("abs_moment_pow: sigma must be > 0");
    return std::pow(sigma, q) * std::exp2(0.5 * q) * std::tgamma(0.5 * (q + 1.0)) *
           std::numbers::inv_sqrtpi;
}

// sigma_q = (E|xi|^q)^{1/q}.
inline double abs_moment(double q, double sigma) {
    return std::pow(abs_moment_pow(q, sigma), 1.0 / q);
}

struct QuadResult {
    double value = 0.0;
    double error_bound = 0.0;
    std::size_t evaluations = 0;
};

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
inline constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};
inline constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

template <class F>
std::pair<double, double> qk15(F&& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const double fc = f(c);
    double kron = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double fa = f(c - h * kXgk[i]);
        const double fb = f(c + h * kXgk[i]);
        kron += kWgk[i] * (fa + fb);
        if (i % 2 == 1) gauss += kWg[i / 2] * (fa + fb);
    }
    return {kron * h, std::abs(kron - gauss) * h};
}

} // namespace detail

// Adaptive Gauss-Kronrod integration of f over the finite interval [lo, hi]
// to estimated absolute error <= tol. Throws numerical_error (carrying the
// best estimate) if the refinement budget runs out first.
template <class F>
QuadResult integrate(F&& f, double lo, double hi, double tol = kQuadTol) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument(
            "integrate: bounds must be finite (use integrate_gaussian for weighted "
            "integrals over the whole line)");
    if (lo > hi)
        throw std::invalid_argument("integrate: lo > hi");
    if (!(tol > 0.0))
        throw std::invalid_argument("integrate: tol must be > 0");
    if (lo == hi) return QuadResult{0.0, 0.0, 0};

    struct Interval {
        double lo, hi, value, err;
    };
    constexpr std::size_t kMaxIntervals = 1u << 15;

    QuadResult out;
    auto eval = [&](double a, double b) {
        auto [v, e] = detail::qk15(f, a, b);
        out.evaluations += 15;
        return Interval{a, b, v, e};
    };

    const double total_len = hi - lo;
    std::vector<Interval> stack{eval(lo, hi)};
    std::size_t splits = 0;
    double value = 0.0, err = 0.0;
    while (!stack.empty()) {
        Interval iv = stack.back();
        stack.pop_back();
        const double local_tol = tol * (iv.hi - iv.lo) / total_len;
        if (iv.err <= std::max(local_tol, 1e-305) || splits >= kMaxIntervals) {
            value += iv.value;
            err += iv.err;
            continue;
        }
        const double mid = 0.5 * (iv.lo + iv.hi);
        if (mid <= iv.lo || mid >= iv.hi) { // interval at floating-point resolution
            value += iv.value;
            err += iv.err;
            continue;
        }
        ++splits;
        stack.push_back(eval(iv.lo, mid));
        stack.push_back(eval(mid, iv.hi));
    }
    out.value = value;
    out.error_bound = err;
    if (err > tol)
        throw numerical_error("integrate: failed to reach tol=" + std::to_string(tol) +
                                  " (estimated error " + std::to_string(err) + ")",
                              value, err);
    return out;
}

// Integral of g(z) * phi_sigma(z - center) over the whole line, where
// phi_sigma is the N(0, sigma^2) density. The range is truncated at
// center +- 10 sigma; the discarded mass is below upper_tail(10) ~ 7.6e-24,
// and the truncation term added to the error bound uses the integrand size
// at the cut points (a valid bound for g of at-most-polynomial growth, which
// covers the bounded rules and |x|^q moments integrated here).
template <class G>
QuadResult integrate_gaussian(G&& g, double center, double sigma, double tol = kQuadTol) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("integrate_gaussian: sigma must be > 0");
    const double lo = center - kTruncationSigmas * sigma;
    const double hi = center + kTruncationSigmas * sigma;
    auto weighted = [&](double z) {
        return g(z) * density((z - center) / sigma) / sigma;
    };
    QuadResult r = integrate(weighted, lo, hi, tol);
    const double trunc = (std::abs(g(lo)) + std::abs(g(hi)) + 1.0) *
                         upper_tail(kTruncationSigmas - 1.0);
    r.error_bound += trunc;
    return r;
}

} // namespace smse::gauss
