// Acceptance suite: one pass/fail line per criterion, each runnable on its
// own (argv[1] = criterion number, argv[2] = path to the CLI binary for the
// reproducibility check). Criteria pin their tolerances in code; a failing
// line reports the measured values so the miss is inspectable.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "smse/bayes.hpp"
#include "smse/estimators.hpp"
#include "smse/gauss.hpp"
#include "smse/montecarlo.hpp"
#include "smse/problem.hpp"
#include "smse/rates.hpp"

using namespace smse;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g;
    const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        g.push_back(std::exp(std::log(lo) + step * static_cast<double>(i)));
    return g;
}

const ProblemConfig kDesk{1 << 14, 16, 1.0, 2.0};

// C1: tail sandwich holds on {0, 0.1, ..., 10}, under one second.
Outcome c1() {
    const auto start = Clock::now();
    for (int i = 0; i <= 100; ++i) {
        const double y = 0.1 * i;
        const auto b = gauss::tail_sandwich(y);
        if (!(b.lower <= b.exact && b.exact <= b.upper))
            return {false, fmt("sandwich violated at y=%.1f", y)};
    }
    const double t = seconds_since(start);
    return {t < 1.0, fmt("101 grid points, %.3f s (< 1 s)", t)};
}

// C2: |t(t*) - t*| < 1e-12 on 20 configs; grid argmin lands at t*.
Outcome c2() {
    const std::pair<std::size_t, std::size_t> shapes[] = {
        {10, 2},   {10, 4},    {64, 4},    {100, 10},  {100, 49},
        {256, 8},  {1024, 16}, {1024, 500}, {4096, 64}, {16384, 16}};
    double worst = 0.0;
    int n = 0;
    for (const auto& [p, s] : shapes) {
        for (double sigma : {0.7, 2.0}) {
            const ProblemConfig cfg{p, s, sigma, 2.0};
            const double ts = rates::t_star(cfg);
            worst = std::max(worst, std::abs(rates::threshold_t(ts, cfg) - ts));
            ++n;
        }
    }
    if (!(worst < 1e-12)) return {false, fmt("max |t(t*)-t*| = %.3e", worst)};

    const double ts = rates::t_star(kDesk);
    const auto grid = log_grid(0.25 * ts, 4.0 * ts, 257);
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (rates::threshold_t(grid[i], kDesk) < rates::threshold_t(grid[best], kDesk))
            best = i;
    const double step = grid[1] / grid[0];
    const double off = std::max(grid[best] / ts, ts / grid[best]);
    if (!(off <= step))
        return {false, fmt("grid argmin %.6f vs t* %.6f (off factor %.6f > step %.6f)",
                           grid[best], ts, off, step)};
    return {true, fmt("%d configs, max |t(t*)-t*| = %.2e; argmin within one step", n, worst)};
}

// C3: a_q(eps) threshold identities to 1e-10 at the desk config.
Outcome c3() {
    double worst = 0.0;
    for (double eps : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double a = rates::a_eps(eps, kDesk);
        const double t = rates::threshold_t(a, kDesk);
        const double bump = kDesk.q * eps * kDesk.loglog_ratio();
        worst = std::max(worst, std::abs(t - std::sqrt(2.0 * kDesk.log_ratio() + bump)));
        worst = std::max(worst, std::abs((a - t) - std::sqrt(bump)));
    }
    return {worst < 1e-10, fmt("max identity residual = %.3e (< 1e-10)", worst)};
}

// C4: oracle-support risk within 4 std errors of s sigma_q^q, q in {1,2,4}.
Outcome c4() {
    const auto start = Clock::now();
    std::string detail;
    bool pass = true;
    for (double q : {1.0, 2.0, 4.0}) {
        const ProblemConfig cfg{1024, 16, 1.0, q};
        const auto beta = worst_case_signal(cfg, ScaleParam{6.0}, SupportPattern::Prefix);
        const auto est = mc::empirical_risk(EstimatorSpec{OracleSupport{beta.support}},
                                            beta, cfg, 10000, 8001, mc::LqRisk{q});
        const double target = 16.0 * gauss::abs_moment_pow(q, 1.0);
        const double dev = std::abs(est.mean - target) / est.std_err;
        detail += fmt("q=%g: mean %.4f vs %.4f (%.2f se); ", q, est.mean, target, dev);
        pass = pass && dev <= 4.0;
    }
    const double t = seconds_since(start);
    detail += fmt("%.1f s (< 30 s)", t);
    return {pass && t < 30.0, detail};
}

// C5: empirical risk over s sigma_2^2 at a = a_2(1) within [0.7, 1.6].
Outcome c5() {
    const auto start = Clock::now();
    const double a1 = rates::a_eps(1.0, kDesk);
    const auto beta = worst_case_signal(kDesk, ScaleParam{a1}, SupportPattern::Prefix);
    const auto est = mc::empirical_risk(EstimatorSpec{ScaledHard{a1}}, beta, kDesk, 200,
                                        8002, mc::LqRisk{2.0});
    const double ratio = est.mean / 16.0;
    const double t = seconds_since(start);
    const bool pass = ratio >= 0.7 && ratio <= 1.6 && t < 120.0;
    return {pass, fmt("a_2(1)=%.4f risk=%.3f (se %.3f) ratio=%.4f, band [0.7,1.6], %.1f s",
                      a1, est.mean, est.std_err, ratio, t)};
}

// C6: hard-recovery ceiling and the phase-transition factor.
Outcome c6() {
    const double ts = rates::t_star(kDesk);
    const double a1 = rates::a_eps(1.0, kDesk);
    const double lo = 0.5 * ts, hi = 2.0 * a1;

    const auto beta_lo = worst_case_signal(kDesk, ScaleParam{lo}, SupportPattern::Prefix);
    const auto est_lo = mc::empirical_risk(EstimatorSpec{ScaledHard{lo}}, beta_lo, kDesk,
                                           200, 8003, mc::LqRisk{2.0});
    const auto beta_hi = worst_case_signal(kDesk, ScaleParam{hi}, SupportPattern::Prefix);
    const auto est_hi = mc::empirical_risk(EstimatorSpec{ScaledHard{hi}}, beta_hi, kDesk,
                                           200, 8003, mc::LqRisk{2.0});

    const double ceiling = 1.2 * 16.0 * 2.0 * kDesk.log_ratio();
    const double factor = est_lo.mean / est_hi.mean;
    const bool pass = est_lo.mean <= ceiling && factor >= 3.0;
    return {pass, fmt("risk(0.5 t*)=%.2f <= %.2f; risk(2 a_2(1))=%.2f; factor=%.2f (>= 3)",
                      est_lo.mean, ceiling, est_hi.mean, factor)};
}

// C7: risk / Phi_o within [0.1, 1.3] over the 12-point log grid.
Outcome c7() {
    const double ts = rates::t_star(kDesk);
    const double a1 = rates::a_eps(1.0, kDesk);
    const auto grid = log_grid(0.5 * ts, 3.0 * a1, 12);
    const auto rows = mc::sweep(kDesk, mc::matched_scaled_hard(), grid, 200, 8004);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, hi_a = 0.0;
    bool pass = true;
    for (const auto& row : rows) {
        const double r = *row.ratio_to_phi_o;
        lo = std::min(lo, r);
        if (r > hi) {
            hi = r;
            hi_a = row.a;
        }
        pass = pass && r >= 0.1 && r <= 1.3;
    }
    return {pass, fmt("observed ratio range [%.4f, %.4f] (max at a=%.4f), band [0.1,1.3]",
                      lo, hi, hi_a)};
}

// C8: bayes-oracle dominance, quadrature cross-check, q=1 grid search.
Outcome c8() {
    const ProblemConfig cfg{1024, 32, 1.0, 2.0};
    const double s_prime = 16.0;
    const auto grid = log_grid(0.5 * rates::t_star(cfg), 3.0 * rates::a_eps(1.0, cfg), 10);
    double min_margin = std::numeric_limits<double>::infinity();
    for (double a : grid)
        min_margin =
            std::min(min_margin, bayes::verify_lower_bound(cfg, a, s_prime).margin);
    if (!(min_margin >= -1e-6)) return {false, fmt("min margin %.3e < -1e-6", min_margin)};

    // quadrature vs closed form for the indicator rule
    double worst_gap = 0.0;
    for (double q : {1.0, 2.0}) {
        const bayes::TwoPointPrior prior{1.2 * rates::t_star(cfg),
                                         s_prime / static_cast<double>(cfg.p)};
        const double t = rates::threshold_t(prior.a, cfg);
        const bayes::BayesRuleEval rule{q, t, bayes::RuleForm::Indicator};
        const double quad = bayes::component_bayes_risk(q, prior, 1.0, rule, 1e-10);
        const double closed = bayes::indicator_risk_closed_form(q, prior, 1.0, t);
        worst_gap = std::max(worst_gap, std::abs(quad - closed));
    }
    if (!(worst_gap <= 1e-9))
        return {false, fmt("indicator quadrature vs closed form gap %.3e > 1e-9", worst_gap)};

    // q = 1: no threshold on the grid beats the matched rule by more than 1e-6
    const bayes::TwoPointPrior prior{rates::t_star(cfg), s_prime / 1024.0};
    const double matched = bayes::indicator_risk_closed_form(
        1.0, prior, 1.0, bayes::matched_threshold(prior, 1.0));
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 1000; ++k)
        best = std::min(best, bayes::indicator_risk_closed_form(
                                  1.0, prior, 1.0, prior.a * k / 1000.0));
    if (!(best >= matched - 1e-6))
        return {false, fmt("grid search improved on matched rule by %.3e", matched - best)};

    return {true, fmt("min margin %.3e; quad gap %.2e; grid-search slack %.2e", min_margin,
                      worst_gap, best - matched)};
}

// C9: adaptive rule coordinate-identical to the matched rule at a_q(1).
Outcome c9() {
    const double a1 = rates::a_eps(1.0, kDesk);
    const auto beta = worst_case_signal(kDesk, ScaleParam{a1}, SupportPattern::Prefix);
    for (std::uint64_t k = 0; k < 100; ++k) {
        const auto obs = sample_observation(beta, kDesk, rng::substream_seed(8009, k));
        const auto lhs = estimate(EstimatorSpec{AdaptiveHard{}}, obs, kDesk);
        const auto rhs = estimate(EstimatorSpec{ScaledHard{a1}}, obs, kDesk);
        if (lhs.values != rhs.values)
            return {false, fmt("estimates diverged on observation %llu",
                               static_cast<unsigned long long>(k))};
    }
    return {true, "100/100 observations coordinate-identical"};
}

// C10: a scale with near-oracle risk but failed exact recovery (s >> log p).
Outcome c10() {
    const ProblemConfig cfg{1 << 14, 256, 1.0, 2.0};
    const auto grid =
        log_grid(0.5 * rates::t_star(cfg), 3.0 * rates::a_eps(1.0, cfg), 16);
    const auto rows = mc::sweep(cfg, mc::matched_scaled_hard(), grid, 200, 8005);
    for (const auto& row : rows) {
        const double ratio = row.risk.mean / 256.0;
        if (ratio <= 1.6 && row.exact_recovery.mean <= 0.5)
            return {true, fmt("a*=%.4f: risk/(s sigma_2^2)=%.3f <= 1.6, "
                              "P(exact recovery)=%.3f <= 0.5",
                              row.a, ratio, row.exact_recovery.mean)};
    }
    return {false, "no grid point with ratio <= 1.6 and recovery <= 0.5"};
}

// C11: identical seeds give byte-identical sweep CSVs through the CLI.
Outcome c11(const std::string& cli) {
    if (cli.empty()) return {false, "path to the CLI binary not provided"};
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path();
    const fs::path out1 = dir / "smse_accept_rerun_1.csv";
    const fs::path out2 = dir / "smse_accept_rerun_2.csv";
    const std::string args =
        " sweep --p 4096 --s 16 --sigma 1 --q 2 --a-steps 6 --reps 100 --seed 777 --out ";
    const std::string cmd1 = "\"" + cli + "\"" + args + "\"" + out1.string() + "\"";
    const std::string cmd2 = "\"" + cli + "\"" + args + "\"" + out2.string() + "\"";
    if (std::system(cmd1.c_str()) != 0) return {false, "first CLI run failed"};
    if (std::system(cmd2.c_str()) != 0) return {false, "second CLI run failed"};

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string b1 = slurp(out1), b2 = slurp(out2);
    fs::remove(out1);
    fs::remove(out2);
    if (b1.empty()) return {false, "empty CSV output"};
    if (b1 != b2) return {false, "reruns differ"};
    return {true, fmt("two runs, %zu bytes each, byte-identical (parallel default)",
                      b1.size())};
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
};

} // namespace

int main(int argc, char** argv) {
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    const std::string cli = argc > 2 ? argv[2] : "";

    const Criterion criteria[] = {
        {1, "tail sandwich", c1},
        {2, "threshold fixed point", c2},
        {3, "a_q(eps) identities", c3},
        {4, "oracle calibration", c4},
        {5, "hard-estimation regime band", c5},
        {6, "hard-recovery ceiling and transition factor", c6},
        {7, "risk/Phi_o sandwich over the grid", c7},
        {8, "bayes-oracle dominance", c8},
        {9, "adaptive equivalence", c9},
        {10, "recovery-vs-estimation separation", c10},
    };

    int failures = 0;
    auto report = [&](int id, const char* name, const Outcome& o) {
        std::printf("[%s] C%-2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name,
                    o.detail.c_str());
        if (!o.pass) ++failures;
    };

    for (const auto& c : criteria)
        if (only == 0 || only == c.id) report(c.id, c.name, c.fn());
    if (only == 0 || only == 11)
        report(11, "byte-identical rerun through the CLI", c11(cli));

    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
