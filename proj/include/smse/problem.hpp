#pragma once
// Core domain types: the Gaussian sequence model Y = beta + sigma*xi, the
// class of s-sparse vectors with nonzero magnitudes at least a, and
// deterministic instance generation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smse/rng.hpp"

namespace smse {

// Ambient experiment parameters: dimension p, sparsity s, noise level sigma,
// loss exponent q. Constraints that only some rate functions need (s < p/2,
// s <= p/4, log(p/s-1) > 1) are checked at the call sites that need them.
struct ProblemConfig {
    std::size_t p = 0;
    std::size_t s = 0;
    double sigma = 1.0;
    double q = 2.0;

    void validate() const {
        if (p == 0 || s == 0 || s >= p)
            throw std::invalid_argument("ProblemConfig: need 1 <= s < p");
        if (!(sigma >= 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("ProblemConfig: sigma must be >= 0 (0 is a test hook)");
        if (!(q >= 1.0) || !std::isfinite(q))
            throw std::invalid_argument("ProblemConfig: q must be >= 1");
    }

    // log(p/s - 1); positive iff s < p/2.
    double log_ratio() const {
        validate();
        if (2 * s >= p)
            throw std::invalid_argument("ProblemConfig: s < p/2 required for log(p/s-1)");
        return std::log(static_cast<double>(p) / static_cast<double>(s) - 1.0);
    }

    // loglog(p/s - 1); callers needing it also need s <= p/4.
    double loglog_ratio() const {
        if (4 * s > p)
            throw std::invalid_argument("ProblemConfig: s <= p/4 required");
        const double lr = log_ratio();
        if (!(lr > 1.0))
            throw std::invalid_argument("ProblemConfig: log(p/s-1) > 1 required");
        return std::log(lr);
    }
};

struct ScaleParam {
    double a;
    void validate() const {
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("ScaleParam: a must be positive and finite");
    }
};

// A length-p vector together with its support (sorted indices of nonzeros).
struct SparseSignal {
    std::vector<double> values;
    std::vector<std::size_t> support;

    static SparseSignal from_values(std::vector<double> v) {
        SparseSignal sig;
        sig.values = std::move(v);
        for (std::size_t j = 0; j < sig.values.size(); ++j)
            if (sig.values[j] != 0.0) sig.support.push_back(j);
        return sig;
    }

    std::size_t dim() const noexcept { return values.size(); }
    std::size_t num_nonzero() const noexcept { return support.size(); }
};

struct NoisyObservation {
    std::vector<double> y;
    std::uint64_t seed = 0;
};

// Identity design, or an explicit list of p column norms ||X_j||_2.
class DesignSpec {
public:
    static DesignSpec identity() { return DesignSpec{}; }

    static DesignSpec column_norms(std::vector<double> norms) {
        for (double n : norms)
            if (!(n > 0.0) || !std::isfinite(n))
                throw std::invalid_argument("DesignSpec: column norms must be positive");
        DesignSpec d;
        d.norms_ = std::move(norms);
        return d;
    }

    bool is_identity() const noexcept { return !norms_.has_value(); }

    std::size_t dim_or(std::size_t p) const noexcept {
        return norms_ ? norms_->size() : p;
    }

    double norm(std::size_t j) const { return norms_ ? (*norms_)[j] : 1.0; }

    void check_dim(std::size_t p) const {
        if (norms_ && norms_->size() != p)
            throw std::invalid_argument("DesignSpec: expected " + std::to_string(p) +
                                        " column norms, got " + std::to_string(norms_->size()));
    }

private:
    std::optional<std::vector<double>> norms_;
};

enum class SupportPattern { Prefix, SeededRandom };

// True iff |beta|_0 <= s and every nonzero component has |beta_i| >= a.
inline bool check_membership(const SparseSignal& beta, const ProblemConfig& cfg,
                             ScaleParam a) {
    cfg.validate();
    a.validate();
    if (beta.dim() != cfg.p)
        throw std::invalid_argument("check_membership: signal has dimension " +
                                    std::to_string(beta.dim()) + ", config expects " +
                                    std::to_string(cfg.p));
    if (beta.num_nonzero() > cfg.s) return false;
    for (std::size_t j : beta.support)
        if (std::abs(beta.values[j]) < a.a) return false;
    return true;
}

// Probe signal with exactly s nonzeros, each equal to +a. The supremum over
// the class is approached at minimal magnitudes and the coordinate-wise
// estimators are sign-symmetric, so this is the standard worst-case probe
// (a probe, not a proof of attainment).
inline SparseSignal worst_case_signal(const ProblemConfig& cfg, ScaleParam a,
                                      SupportPattern pattern,
                                      std::uint64_t seed = 0) {
    cfg.validate();
    a.validate();
    std::vector<double> v(cfg.p, 0.0);
    if (pattern == SupportPattern::Prefix) {
        std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(cfg.s), a.a);
    } else {
        // Partial Fisher-Yates over 0..p-1 driven by the counter stream.
        std::vector<std::size_t> idx(cfg.p);
        for (std::size_t j = 0; j < cfg.p; ++j) idx[j] = j;
        rng::CounterStream stream(seed, /*stream=*/1);
        for (std::size_t j = 0; j < cfg.s; ++j) {
            const auto r = static_cast<std::size_t>(
                stream.uniform(j) * static_cast<double>(cfg.p - j));
            std::swap(idx[j], idx[j + std::min(r, cfg.p - j - 1)]);
        }
        for (std::size_t j = 0; j < cfg.s; ++j) v[idx[j]] = a.a;
    }
    return SparseSignal::from_values(std::move(v));
}

// y = beta + sigma*xi with xi drawn coordinate-wise from a counter stream:
// a pure function of (beta, cfg, seed), independent of evaluation order.
inline NoisyObservation sample_observation(const SparseSignal& beta,
                                           const ProblemConfig& cfg,
                                           std::uint64_t seed) {
    cfg.validate();
    if (beta.dim() != cfg.p)
        throw std::invalid_argument("sample_observation: dimension mismatch");
    rng::CounterStream stream(seed, /*stream=*/0);
    NoisyObservation obs;
    obs.seed = seed;
    obs.y.resize(cfg.p);
    for (std::size_t j = 0; j < cfg.p; ++j)
        obs.y[j] = beta.values[j] + cfg.sigma * stream.normal(j);
    return obs;
}

} // namespace smse
