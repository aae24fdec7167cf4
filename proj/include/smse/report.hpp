#pragma once
// CSV / JSON emission for rate tables, sweep rows and bayes-check records.
//
// CSV: UTF-8, comma separators, '.' decimal point, floats printed with 17
// significant digits (round-trip exact). Fields whose preconditions fail on
// the given config are marked "oob" rather than dropped; JSON uses null for
// the same. A format-version comment line precedes the fixed header.

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "smse/bayes.hpp"
#include "smse/montecarlo.hpp"
#include "smse/rates.hpp"

namespace smse::report {

inline std::string g17(double v) {
    if (!std::isfinite(v)) return "oob";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string g17(const std::optional<double>& v) {
    return v ? g17(*v) : std::string("oob");
}

inline nlohmann::json json_of(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline nlohmann::json json_of(const std::optional<double>& v) {
    return v ? json_of(*v) : nlohmann::json(nullptr);
}

inline std::string regime_str(const std::optional<rates::RegimeLabel>& r) {
    return r ? r->to_string() : std::string("oob");
}

// ---- rates table ----------------------------------------------------------

inline constexpr const char* kRatesHeader =
    "a,t_of_a,t_star,a_q0,a_q1,psi,psi_plus,phi,phi_plus,phi_o,phi_ad,regime";

// A rate row, or an all-oob marker row when the whole config is out of
// domain at this a (e.g. s >= p/2).
struct RateRow {
    double a = 0.0;
    std::optional<rates::RateReport> report;
};

inline std::string rates_csv(std::span<const RateRow> rows) {
    std::string out = "# format: smse-rates-v1\n";
    out += kRatesHeader;
    out += '\n';
    for (const auto& row : rows) {
        if (!row.report) {
            out += g17(row.a) + ",oob,oob,oob,oob,oob,oob,oob,oob,oob,oob,oob\n";
            continue;
        }
        const auto& r = *row.report;
        out += g17(r.a) + ',' + g17(r.t_of_a) + ',' + g17(r.t_star) + ',' + g17(r.a_q0) +
               ',' + g17(r.a_q1) + ',' + g17(r.psi) + ',' + g17(r.psi_plus) + ',' +
               g17(r.phi) + ',' + g17(r.phi_plus) + ',' + g17(r.phi_o) + ',' +
               g17(r.phi_ad) + ',' + regime_str(r.regime) + '\n';
    }
    return out;
}

inline nlohmann::json rates_json(std::span<const RateRow> rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json o;
        o["a"] = row.a;
        if (!row.report) {
            o["oob"] = true;
        } else {
            const auto& r = *row.report;
            o["t_of_a"] = json_of(r.t_of_a);
            o["t_star"] = json_of(r.t_star);
            o["a_q0"] = json_of(r.a_q0);
            o["a_q1"] = json_of(r.a_q1);
            o["psi"] = json_of(r.psi);
            o["psi_plus"] = json_of(r.psi_plus);
            o["phi"] = json_of(r.phi);
            o["phi_plus"] = json_of(r.phi_plus);
            o["phi_o"] = json_of(r.phi_o);
            o["phi_ad"] = json_of(r.phi_ad);
            o["regime"] = r.regime ? nlohmann::json(r.regime->to_string())
                                   : nlohmann::json(nullptr);
        }
        arr.push_back(std::move(o));
    }
    return arr;
}

// ---- sweep table -----------------------------------------------------------

inline constexpr const char* kSweepHeader =
    "a,regime,estimator,q,p,s,sigma,reps,seed,risk_mean,risk_stderr,hamming_mean,"
    "hamming_stderr,exact_recovery,phi,phi_plus,phi_o,phi_ad,ratio_to_phi_o";

struct LabeledSweep {
    std::string estimator;
    std::vector<mc::SweepRow> rows;
};

inline std::string sweep_csv(const ProblemConfig& cfg, std::span<const LabeledSweep> sweeps,
                             std::size_t reps, std::uint64_t seed) {
    std::string out = "# format: smse-sweep-v1\n";
    out += kSweepHeader;
    out += '\n';
    for (const auto& sw : sweeps) {
        for (const auto& r : sw.rows) {
            out += g17(r.a) + ',' + regime_str(r.regime) + ',' + sw.estimator + ',' +
                   g17(cfg.q) + ',' + std::to_string(cfg.p) + ',' + std::to_string(cfg.s) +
                   ',' + g17(cfg.sigma) + ',' + std::to_string(reps) + ',' +
                   std::to_string(seed) + ',' + g17(r.risk.mean) + ',' +
                   g17(r.risk.std_err) + ',' + g17(r.hamming.mean) + ',' +
                   g17(r.hamming.std_err) + ',' + g17(r.exact_recovery.mean) + ',' +
                   g17(r.phi) + ',' + g17(r.phi_plus) + ',' + g17(r.phi_o) + ',' +
                   g17(r.phi_ad) + ',' + g17(r.ratio_to_phi_o) + '\n';
        }
    }
    return out;
}

inline nlohmann::json sweep_json(const ProblemConfig& cfg,
                                 std::span<const LabeledSweep> sweeps, std::size_t reps,
                                 std::uint64_t seed) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& sw : sweeps) {
        for (const auto& r : sw.rows) {
            nlohmann::json o;
            o["a"] = r.a;
            o["regime"] =
                r.regime ? nlohmann::json(r.regime->to_string()) : nlohmann::json(nullptr);
            o["estimator"] = sw.estimator;
            o["q"] = cfg.q;
            o["p"] = cfg.p;
            o["s"] = cfg.s;
            o["sigma"] = cfg.sigma;
            o["reps"] = reps;
            o["seed"] = seed;
            o["risk_mean"] = json_of(r.risk.mean);
            o["risk_stderr"] = json_of(r.risk.std_err);
            o["hamming_mean"] = json_of(r.hamming.mean);
            o["hamming_stderr"] = json_of(r.hamming.std_err);
            o["exact_recovery"] = json_of(r.exact_recovery.mean);
            o["phi"] = json_of(r.phi);
            o["phi_plus"] = json_of(r.phi_plus);
            o["phi_o"] = json_of(r.phi_o);
            o["phi_ad"] = json_of(r.phi_ad);
            o["ratio_to_phi_o"] = json_of(r.ratio_to_phi_o);
            arr.push_back(std::move(o));
        }
    }
    return arr;
}

// ---- bayes-check table ------------------------------------------------------

inline constexpr const char* kBayesHeader =
    "a,s_prime,oracle_risk,oracle_risk_matched,bound,margin";

inline std::string bayes_csv(std::span<const bayes::LowerBoundCheck> checks) {
    std::string out = "# format: smse-bayes-check-v1\n";
    out += kBayesHeader;
    out += '\n';
    for (const auto& c : checks) {
        out += g17(c.a) + ',' + g17(c.s_prime) + ',' + g17(c.oracle_risk) + ',' +
               g17(c.oracle_risk_matched) + ',' + g17(c.bound) + ',' + g17(c.margin) + '\n';
    }
    return out;
}

inline nlohmann::json bayes_json(std::span<const bayes::LowerBoundCheck> checks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json o;
        o["a"] = c.a;
        o["s_prime"] = c.s_prime;
        o["oracle_risk"] = json_of(c.oracle_risk);
        o["oracle_risk_matched"] = json_of(c.oracle_risk_matched);
        o["bound"] = json_of(c.bound);
        o["margin"] = json_of(c.margin);
        arr.push_back(std::move(o));
    }
    return arr;
}

} // namespace smse::report
