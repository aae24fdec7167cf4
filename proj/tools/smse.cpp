// smse -- scaled-minimax sparse estimation experiments.
//
// Subcommands:
//   rates        landmark thresholds and rate functions over an a-grid
//   sweep        Monte Carlo risk / Hamming / exact-recovery sweep
//   bayes-check  oracle-vs-lower-bound dominance check
//   selftest     built-in numerical release gate
//
// Configuration precedence: CLI flags > SMSE_* environment variables >
// --config key=value file > built-in defaults.
//
// Exit codes: 0 success, 1 usage/config error, 2 assertion failure
// (bayes-check margins or selftest), 3 I/O error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smse/bayes.hpp"
#include "smse/estimators.hpp"
#include "smse/gauss.hpp"
#include "smse/montecarlo.hpp"
#include "smse/problem.hpp"
#include "smse/rates.hpp"
#include "smse/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAssertion = 2;
constexpr int kExitIo = 3;

struct Settings {
    std::size_t p = 1 << 14;
    std::size_t s = 16;
    double sigma = 1.0;
    double q = 2.0;
    std::optional<double> a_min;
    std::optional<double> a_max;
    std::size_t a_steps = 12;
    std::string a_spacing = "log";
    std::vector<double> a_list;
    std::vector<std::string> estimators{"scaled-hard"};
    std::size_t reps = 200;
    std::uint64_t seed = 20260809;
    std::string out;
    std::string format = "csv";
};

struct Overrides {
    std::map<std::string, std::string> kv;
    std::vector<std::string> estimators; // repeatable key
};

class usage_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

Overrides read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open config file: " + path);
    Overrides o;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error(path + ":" + std::to_string(lineno) +
                              ": expected key=value");
        auto trim = [](std::string v) {
            const auto b = v.find_first_not_of(" \t\r");
            const auto e = v.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "estimator")
            for (auto& e : split(value, ',')) o.estimators.push_back(e);
        else
            o.kv[key] = value;
    }
    return o;
}

Overrides read_env() {
    static const std::pair<const char*, const char*> keys[] = {
        {"SMSE_P", "p"},           {"SMSE_S", "s"},
        {"SMSE_SIGMA", "sigma"},   {"SMSE_Q", "q"},
        {"SMSE_A_MIN", "a_min"},   {"SMSE_A_MAX", "a_max"},
        {"SMSE_A_STEPS", "a_steps"}, {"SMSE_A_SPACING", "a_spacing"},
        {"SMSE_A_LIST", "a_list"}, {"SMSE_REPS", "reps"},
        {"SMSE_SEED", "seed"},     {"SMSE_OUT", "out"},
        {"SMSE_FORMAT", "format"}};
    Overrides o;
    for (const auto& [env, key] : keys)
        if (const char* v = std::getenv(env)) o.kv[key] = v;
    if (const char* v = std::getenv("SMSE_ESTIMATOR"))
        o.estimators = split(v, ',');
    return o;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    std::stringstream ss(value);
    T out{};
    if (!(ss >> out) || !ss.eof())
        throw usage_error("bad value for " + key + ": '" + value + "'");
    return out;
}

void apply(Settings& s, const Overrides& o) {
    for (const auto& [key, value] : o.kv) {
        if (key == "p") s.p = parse_number<std::size_t>(key, value);
        else if (key == "s") s.s = parse_number<std::size_t>(key, value);
        else if (key == "sigma") s.sigma = parse_number<double>(key, value);
        else if (key == "q") s.q = parse_number<double>(key, value);
        else if (key == "a_min") s.a_min = parse_number<double>(key, value);
        else if (key == "a_max") s.a_max = parse_number<double>(key, value);
        else if (key == "a_steps") s.a_steps = parse_number<std::size_t>(key, value);
        else if (key == "a_spacing") s.a_spacing = value;
        else if (key == "a_list") {
            s.a_list.clear();
            for (auto& item : split(value, ','))
                s.a_list.push_back(parse_number<double>(key, item));
        } else if (key == "reps") s.reps = parse_number<std::size_t>(key, value);
        else if (key == "seed") s.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "out") s.out = value;
        else if (key == "format") s.format = value;
        else throw usage_error("unknown config key: " + key);
    }
    if (!o.estimators.empty()) s.estimators = o.estimators;
}

smse::ProblemConfig problem_of(const Settings& s) {
    smse::ProblemConfig cfg{s.p, s.s, s.sigma, s.q};
    cfg.validate();
    if (!(cfg.sigma > 0.0)) throw usage_error("sigma must be > 0");
    return cfg;
}

std::vector<double> build_grid(const Settings& s, const smse::ProblemConfig& cfg) {
    if (!s.a_list.empty()) {
        for (double a : s.a_list)
            if (!(a > 0.0) || !std::isfinite(a))
                throw usage_error("a_list entries must be positive and finite");
        return s.a_list;
    }
    double lo, hi;
    if (s.a_min && s.a_max) {
        lo = *s.a_min;
        hi = *s.a_max;
    } else {
        // Default window spanning the phase transition.
        const double ts = smse::rates::t_star(cfg);
        lo = s.a_min.value_or(0.5 * ts);
        double upper;
        try {
            upper = 3.0 * smse::rates::a_eps(1.0, cfg);
        } catch (const std::invalid_argument&) {
            upper = 4.0 * ts;
        }
        hi = s.a_max.value_or(upper);
    }
    if (!(lo > 0.0) || !(hi > 0.0)) throw usage_error("grid bounds must be positive");
    if (hi < lo) throw usage_error("a_max must be >= a_min");
    if (s.a_steps < 1) throw usage_error("a_steps must be >= 1");
    std::vector<double> grid;
    grid.reserve(s.a_steps);
    if (s.a_steps == 1) {
        grid.push_back(lo);
        return grid;
    }
    if (s.a_spacing == "linear") {
        const double step = (hi - lo) / static_cast<double>(s.a_steps - 1);
        for (std::size_t i = 0; i < s.a_steps; ++i)
            grid.push_back(lo + step * static_cast<double>(i));
    } else if (s.a_spacing == "log") {
        const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(s.a_steps - 1);
        for (std::size_t i = 0; i < s.a_steps; ++i)
            grid.push_back(std::exp(std::log(lo) + step * static_cast<double>(i)));
    } else {
        throw usage_error("a_spacing must be 'linear' or 'log'");
    }
    return grid;
}

smse::mc::EstimatorFamily parse_estimator(const std::string& text) {
    const auto eq = text.find('=');
    const std::string name = eq == std::string::npos ? text : text.substr(0, eq);
    const std::string arg = eq == std::string::npos ? "" : text.substr(eq + 1);
    if (name == "scaled-hard") {
        if (arg.empty()) return smse::mc::matched_scaled_hard();
        return smse::mc::fixed_scaled_hard(parse_number<double>("estimator", arg));
    }
    if (name == "adaptive-hard") return smse::mc::adaptive_hard();
    if (name == "oracle-support") return smse::mc::oracle_support();
    if (name == "universal-hard") {
        if (arg.empty()) throw usage_error("universal-hard needs '=tau'");
        return smse::mc::universal_hard(parse_number<double>("estimator", arg));
    }
    throw usage_error("unknown estimator '" + text +
                      "' (expected scaled-hard[=a], adaptive-hard, oracle-support, "
                      "universal-hard=tau)");
}

std::size_t thread_count() {
    if (const char* v = std::getenv("SMSE_THREADS"))
        return parse_number<std::size_t>("SMSE_THREADS", v);
    return 0; // auto
}

void write_output(const Settings& s, const std::string& text) {
    if (s.out.empty()) {
        std::cout << text;
        if (!std::cout) throw std::ios_base::failure("write to stdout failed");
        return;
    }
    std::ofstream out(s.out, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open output file: " + s.out);
    out << text;
    out.flush();
    if (!out) throw std::ios_base::failure("write failed: " + s.out);
}

std::string render(const Settings& s, const std::string& csv, const nlohmann::json& json) {
    if (s.format == "csv") return csv;
    if (s.format == "json") return json.dump(2) + "\n";
    throw usage_error("format must be 'csv' or 'json'");
}

// ---- subcommands -----------------------------------------------------------

int cmd_rates(const Settings& s) {
    const smse::ProblemConfig cfg = problem_of(s);
    std::vector<double> grid;
    try {
        grid = build_grid(s, cfg);
    } catch (const std::invalid_argument& e) {
        throw usage_error(std::string("cannot build default grid (") + e.what() +
                          "); pass --a-min/--a-max explicitly");
    }
    if (grid.empty()) throw usage_error("empty a-grid");
    std::vector<smse::report::RateRow> rows;
    rows.reserve(grid.size());
    for (double a : grid) {
        smse::report::RateRow row;
        row.a = a;
        try {
            row.report = smse::rates::rate_report(cfg, a);
        } catch (const std::invalid_argument&) {
            // marked, not dropped
        }
        rows.push_back(std::move(row));
    }
    write_output(s, render(s, smse::report::rates_csv(rows), smse::report::rates_json(rows)));
    return kExitOk;
}

int cmd_sweep(const Settings& s) {
    const smse::ProblemConfig cfg = problem_of(s);
    if (2 * cfg.s >= cfg.p)
        throw usage_error("sweep requires s < p/2 (thresholds undefined otherwise)");
    const std::vector<double> grid = build_grid(s, cfg);
    if (grid.empty()) throw usage_error("empty a-grid");
    if (s.estimators.empty()) throw usage_error("no estimators given");

    std::vector<smse::report::LabeledSweep> sweeps;
    for (const auto& text : s.estimators) {
        auto family = parse_estimator(text);
        auto rows = smse::mc::sweep(cfg, family, grid, s.reps, s.seed,
                                    smse::SupportPattern::Prefix, thread_count());
        sweeps.push_back({family.name, std::move(rows)});
    }
    write_output(s, render(s, smse::report::sweep_csv(cfg, sweeps, s.reps, s.seed),
                           smse::report::sweep_json(cfg, sweeps, s.reps, s.seed)));
    return kExitOk;
}

int cmd_bayes_check(const Settings& s) {
    const smse::ProblemConfig cfg = problem_of(s);
    if (cfg.s < 2) throw usage_error("bayes-check requires s >= 2 (uses s' = s/2)");
    const std::vector<double> grid = build_grid(s, cfg);
    if (grid.empty()) throw usage_error("empty a-grid");
    const double s_prime = static_cast<double>(cfg.s) / 2.0;

    std::vector<smse::bayes::LowerBoundCheck> checks;
    checks.reserve(grid.size());
    double min_margin = std::numeric_limits<double>::infinity();
    for (double a : grid) {
        checks.push_back(smse::bayes::verify_lower_bound(cfg, a, s_prime));
        min_margin = std::min(min_margin, checks.back().margin);
    }
    write_output(s, render(s, smse::report::bayes_csv(checks),
                           smse::report::bayes_json(checks)));
    const bool ok = min_margin >= -1e-6;
    std::cerr << "bayes-check: min margin = " << smse::report::g17(min_margin)
              << (ok ? " (oracle dominates bound)" : " VIOLATION") << "\n";
    return ok ? kExitOk : kExitAssertion;
}

int cmd_selftest(bool inject_fault) {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    {
        bool ok = true;
        for (int i = 0; i <= 100; ++i) {
            const auto b = smse::gauss::tail_sandwich(0.1 * i);
            ok = ok && b.lower <= b.exact && b.exact <= b.upper;
        }
        check("tail sandwich on y in {0,0.1,...,10}", ok);
    }
    {
        bool ok = true;
        const double qs[] = {1.0, 1.5, 2.0, 3.0, 4.0};
        for (double q : qs)
            for (double sigma : {1.0, 2.0}) {
                const double expected =
                    smse::gauss::abs_moment_pow(q, sigma) * (inject_fault ? 1.001 : 1.0);
                const double quad =
                    smse::gauss::integrate_gaussian(
                        [&](double x) { return std::pow(std::abs(x), q); }, 0.0, sigma)
                        .value;
                ok = ok && std::abs(quad - expected) <= 1e-8 * expected;
            }
        check("absolute moments vs quadrature", ok);
    }
    {
        bool ok = true;
        const std::pair<std::size_t, std::size_t> shapes[] = {
            {64, 4}, {1024, 16}, {16384, 16}, {100, 33}, {1000, 499}};
        for (const auto& [p, s_] : shapes) {
            const smse::ProblemConfig cfg{p, s_, 1.0, 2.0};
            const double ts = smse::rates::t_star(cfg);
            ok = ok && std::abs(smse::rates::threshold_t(ts, cfg) - ts) < 1e-12 * ts;
        }
        check("threshold fixed point t(t*) = t*", ok);
    }
    {
        const smse::ProblemConfig cfg{1 << 14, 16, 1.0, 2.0};
        bool ok = true;
        for (double eps : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const double a = smse::rates::a_eps(eps, cfg);
            const double t = smse::rates::threshold_t(a, cfg);
            const double bump = cfg.q * eps * cfg.loglog_ratio();
            ok = ok && std::abs(t - std::sqrt(2.0 * cfg.log_ratio() + bump)) < 1e-10;
            ok = ok && std::abs((a - t) - std::sqrt(bump)) < 1e-10;
        }
        check("a_q(eps) threshold identities", ok);
    }
    {
        const smse::ProblemConfig cfg{256, 8, 1.0, 2.0};
        const auto beta = smse::worst_case_signal(cfg, smse::ScaleParam{10.0},
                                                  smse::SupportPattern::Prefix);
        const auto est = smse::mc::empirical_risk(
            smse::EstimatorSpec{smse::OracleSupport{beta.support}}, beta, cfg, 4000,
            987654321u, smse::mc::LqRisk{2.0}, thread_count());
        const double target = 8.0; // s * sigma_2^2
        check("oracle-support risk calibration",
              std::abs(est.mean - target) <= 4.0 * est.std_err);
    }
    {
        const smse::ProblemConfig cfg{1024, 16, 1.0, 2.0};
        const double a1 = smse::rates::a_eps(1.0, cfg);
        bool ok = true;
        for (std::uint64_t k = 0; k < 5; ++k) {
            const auto beta = smse::worst_case_signal(cfg, smse::ScaleParam{a1},
                                                      smse::SupportPattern::Prefix);
            const auto obs = smse::sample_observation(beta, cfg, 1000 + k);
            const auto lhs = smse::estimate(smse::EstimatorSpec{smse::AdaptiveHard{}}, obs, cfg);
            const auto rhs = smse::estimate(smse::EstimatorSpec{smse::ScaledHard{a1}}, obs, cfg);
            ok = ok && lhs.values == rhs.values;
        }
        check("adaptive threshold equals t(a_q(1))", ok);
    }

    std::cout << (failures == 0 ? "selftest: all checks passed"
                                : "selftest: FAILURES detected")
              << "\n";
    return failures == 0 ? kExitOk : kExitAssertion;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scaled-minimax sparse estimation experiments"};
    app.require_subcommand(1);

    Settings flag_values;
    std::string config_path;
    bool inject_fault = false;

    struct FlagTrack {
        CLI::Option* p = nullptr;
        CLI::Option* s = nullptr;
        CLI::Option* sigma = nullptr;
        CLI::Option* q = nullptr;
        CLI::Option* a_min = nullptr;
        CLI::Option* a_max = nullptr;
        CLI::Option* a_steps = nullptr;
        CLI::Option* a_spacing = nullptr;
        CLI::Option* estimator = nullptr;
        CLI::Option* reps = nullptr;
        CLI::Option* seed = nullptr;
        CLI::Option* out = nullptr;
        CLI::Option* format = nullptr;
    };

    double flag_a_min = 0.0, flag_a_max = 0.0;
    std::vector<std::string> flag_estimators;

    auto add_common = [&](CLI::App* cmd) {
        FlagTrack t;
        t.p = cmd->add_option("--p", flag_values.p, "ambient dimension p");
        t.s = cmd->add_option("--s", flag_values.s, "sparsity s");
        t.sigma = cmd->add_option("--sigma", flag_values.sigma, "noise level sigma");
        t.q = cmd->add_option("--q", flag_values.q, "loss exponent q");
        t.a_min = cmd->add_option("--a-min", flag_a_min, "grid lower bound");
        t.a_max = cmd->add_option("--a-max", flag_a_max, "grid upper bound");
        t.a_steps = cmd->add_option("--a-steps", flag_values.a_steps, "grid size");
        t.a_spacing = cmd->add_option("--a-spacing", flag_values.a_spacing,
                                      "grid spacing: linear|log");
        t.estimator = cmd->add_option("--estimator", flag_estimators,
                                      "estimator (repeatable): scaled-hard[=a], "
                                      "adaptive-hard, oracle-support, universal-hard=tau");
        t.reps = cmd->add_option("--reps", flag_values.reps, "Monte Carlo replications");
        t.seed = cmd->add_option("--seed", flag_values.seed, "master seed");
        t.out = cmd->add_option("--out", flag_values.out, "output path (default stdout)");
        t.format = cmd->add_option("--format", flag_values.format, "csv|json");
        cmd->add_option("--config", config_path, "key=value config file");
        return t;
    };

    auto* rates_cmd = app.add_subcommand("rates", "rate functions over an a-grid");
    auto rates_flags = add_common(rates_cmd);
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep");
    auto sweep_flags = add_common(sweep_cmd);
    auto* bayes_cmd = app.add_subcommand("bayes-check", "oracle dominance check");
    auto bayes_flags = add_common(bayes_cmd);
    auto* selftest_cmd = app.add_subcommand("selftest", "numerical release gate");
    selftest_cmd->add_flag("--inject-fault", inject_fault,
                           "deliberately corrupt a check (negative test hook)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (selftest_cmd->parsed()) return cmd_selftest(inject_fault);

        const FlagTrack& flags = rates_cmd->parsed() ? rates_flags
                                 : sweep_cmd->parsed() ? sweep_flags
                                                       : bayes_flags;

        // Precedence: defaults < config file < environment < flags.
        Settings s;
        if (!config_path.empty()) apply(s, read_config_file(config_path));
        apply(s, read_env());
        if (flags.p->count()) s.p = flag_values.p;
        if (flags.s->count()) s.s = flag_values.s;
        if (flags.sigma->count()) s.sigma = flag_values.sigma;
        if (flags.q->count()) s.q = flag_values.q;
        if (flags.a_min->count()) s.a_min = flag_a_min;
        if (flags.a_max->count()) s.a_max = flag_a_max;
        if (flags.a_steps->count()) s.a_steps = flag_values.a_steps;
        if (flags.a_spacing->count()) s.a_spacing = flag_values.a_spacing;
        if (flags.estimator->count()) s.estimators = flag_estimators;
        if (flags.reps->count()) s.reps = flag_values.reps;
        if (flags.seed->count()) s.seed = flag_values.seed;
        if (flags.out->count()) s.out = flag_values.out;
        if (flags.format->count()) s.format = flag_values.format;

        if (rates_cmd->parsed()) return cmd_rates(s);
        if (sweep_cmd->parsed()) return cmd_sweep(s);
        return cmd_bayes_check(s);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const smse::gauss::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitAssertion;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
}
