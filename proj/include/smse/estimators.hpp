#pragma once
// Coordinate-wise thresholding estimators and support extraction.
//
// ScaledHard(a):  beta_hat_j = Y_j 1{|Y_j| >= t(a v t*)}
// AdaptiveHard:   beta_hat_j = Y_j 1{|Y_j| >= t*_s},
//                 t*_s = sqrt(2 sigma^2 log(p/s-1) + sigma^2 q loglog(p/s-1)),
//                 which equals t(a_q(1)).
// OracleSupport:  Y restricted to a given support (calibration baseline).
// UniversalHard:  plain hard threshold at a fixed tau (bias baseline).
//
// Ties at the threshold are kept: the rules use ">=".

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "smse/problem.hpp"
#include "smse/rates.hpp"

namespace smse {

struct ScaledHard {
    double a;
};
struct AdaptiveHard {};
struct OracleSupport {
    std::vector<std::size_t> support;
};
struct UniversalHard {
    double tau;
};

using EstimatorSpec = std::variant<ScaledHard, AdaptiveHard, OracleSupport, UniversalHard>;

// Adaptive threshold t*_s. Requires s <= p/4 and log(p/s-1) > 1.
inline double adaptive_threshold(const ProblemConfig& cfg) {
    const double s2 = cfg.sigma * cfg.sigma;
    return std::sqrt(2.0 * s2 * cfg.log_ratio() + s2 * cfg.q * cfg.loglog_ratio());
}

// The hard threshold a given spec applies; OracleSupport has none.
inline double threshold_of(const EstimatorSpec& spec, const ProblemConfig& cfg) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ScaledHard>) {
                if (!(v.a > 0.0))
                    throw std::invalid_argument("ScaledHard: a must be > 0");
                return rates::threshold_t(std::max(v.a, rates::t_star(cfg)), cfg);
            } else if constexpr (std::is_same_v<T, AdaptiveHard>) {
                return adaptive_threshold(cfg);
            } else if constexpr (std::is_same_v<T, UniversalHard>) {
                if (!(v.tau >= 0.0))
                    throw std::invalid_argument("UniversalHard: tau must be >= 0");
                return v.tau;
            } else {
                throw std::invalid_argument("OracleSupport has no threshold");
            }
        },
        spec);
}

inline std::string estimator_name(const EstimatorSpec& spec) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ScaledHard>) {
                char buf[48];
                std::snprintf(buf, sizeof buf, "scaled-hard[a=%.6g]", v.a);
                return buf;
            } else if constexpr (std::is_same_v<T, AdaptiveHard>) {
                return "adaptive-hard";
            } else if constexpr (std::is_same_v<T, UniversalHard>) {
                char buf[48];
                std::snprintf(buf, sizeof buf, "universal-hard[tau=%.6g]", v.tau);
                return buf;
            } else {
                return "oracle-support";
            }
        },
        spec);
}

inline SparseSignal estimate(const EstimatorSpec& spec, const NoisyObservation& obs,
                             const ProblemConfig& cfg) {
    cfg.validate();
    if (obs.y.size() != cfg.p)
        throw std::invalid_argument("estimate: observation has wrong dimension");

    if (const auto* oracle = std::get_if<OracleSupport>(&spec)) {
        std::vector<double> v(cfg.p, 0.0);
        for (std::size_t j : oracle->support) {
            if (j >= cfg.p)
                throw std::invalid_argument("OracleSupport: index out of range");
            v[j] = obs.y[j];
        }
        return SparseSignal::from_values(std::move(v));
    }

    const double tau = threshold_of(spec, cfg);
    std::vector<double> v(cfg.p, 0.0);
    for (std::size_t j = 0; j < cfg.p; ++j)
        if (std::abs(obs.y[j]) >= tau) v[j] = obs.y[j];
    return SparseSignal::from_values(std::move(v));
}

inline const std::vector<std::size_t>& support_of(const SparseSignal& beta_hat) {
    return beta_hat.support;
}

} // namespace smse
