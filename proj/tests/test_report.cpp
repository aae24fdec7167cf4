#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <numbers>
#include <sstream>

#include "smse/report.hpp"

using namespace smse;

namespace {
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    return fields;
}

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> lines;
    std::stringstream ss(csv);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    return lines;
}
} // namespace

TEST_CASE("17-digit floats round-trip exactly", "[report]") {
    const double values[] = {1.0 / 3.0,
                             1e-300,
                             std::numbers::pi * 1e17,
                             -0.1,
                             6.178744153541894,
                             0.0};
    for (double v : values) {
        const std::string s = report::g17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(report::g17(std::numeric_limits<double>::quiet_NaN()) == "oob");
    CHECK(report::g17(std::optional<double>{}) == "oob");
}

TEST_CASE("sweep CSV layout", "[report]") {
    const ProblemConfig cfg{2048, 8, 1.0, 2.0};
    const double ts = rates::t_star(cfg);
    const std::vector<double> grid{0.8 * ts, 1.5 * ts};
    report::LabeledSweep sw{"scaled-hard",
                            mc::sweep(cfg, mc::matched_scaled_hard(), grid, 50, 3)};
    const std::string csv = report::sweep_csv(cfg, std::vector{sw}, 50, 3);

    const auto lines = data_lines(csv);
    REQUIRE(lines.size() == 3); // header + 2 rows
    CHECK(lines[0] == report::kSweepHeader);
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(split_csv_line(lines[i]).size() == 19);
    CHECK(csv.rfind("# format: smse-sweep-v1\n", 0) == 0);
}

TEST_CASE("csv and json carry identical values", "[report]") {
    const ProblemConfig cfg{2048, 8, 1.0, 2.0};
    const double ts = rates::t_star(cfg);
    const std::vector<double> grid{0.8 * ts, 1.5 * ts, 3.0 * ts};
    report::LabeledSweep sw{"scaled-hard",
                            mc::sweep(cfg, mc::matched_scaled_hard(), grid, 50, 3)};
    const std::string csv = report::sweep_csv(cfg, std::vector{sw}, 50, 3);
    const nlohmann::json json = report::sweep_json(cfg, std::vector{sw}, 50, 3);

    const auto lines = data_lines(csv);
    const auto header = split_csv_line(lines[0]);
    REQUIRE(json.size() == lines.size() - 1);
    for (std::size_t row = 0; row < json.size(); ++row) {
        const auto fields = split_csv_line(lines[row + 1]);
        for (std::size_t col = 0; col < header.size(); ++col) {
            const auto& jv = json[row][header[col]];
            if (jv.is_number()) {
                CHECK(std::strtod(fields[col].c_str(), nullptr) == jv.get<double>());
            } else if (jv.is_string()) {
                CHECK(fields[col] == jv.get<std::string>());
            } else if (jv.is_null()) {
                CHECK(fields[col] == "oob");
            }
        }
    }
}

TEST_CASE("rates CSV marks out-of-domain fields", "[report]") {
    const ProblemConfig cfg{100, 30, 1.0, 2.0}; // a_q family undefined
    std::vector<report::RateRow> rows;
    report::RateRow row;
    row.a = 2.0;
    row.report = rates::rate_report(cfg, 2.0);
    rows.push_back(row);
    report::RateRow bad;
    bad.a = -1.0; // whole row out of domain
    rows.push_back(bad);

    const std::string csv = report::rates_csv(rows);
    const auto lines = data_lines(csv);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == report::kRatesHeader);
    const auto good_fields = split_csv_line(lines[1]);
    REQUIRE(good_fields.size() == 12);
    CHECK(good_fields[3] == "oob");  // a_q0
    CHECK(good_fields[11] == "oob"); // regime
    CHECK(good_fields[1] != "oob");  // t_of_a is defined
    const auto bad_fields = split_csv_line(lines[2]);
    for (std::size_t i = 1; i < bad_fields.size(); ++i) CHECK(bad_fields[i] == "oob");

    const auto json = report::rates_json(rows);
    CHECK(json[0]["a_q0"].is_null());
    CHECK(json[0]["t_of_a"].is_number());
    CHECK(json[1]["oob"] == true);
}

TEST_CASE("bayes-check CSV layout", "[report]") {
    const ProblemConfig cfg{256, 8, 1.0, 2.0};
    std::vector<bayes::LowerBoundCheck> checks{
        bayes::verify_lower_bound(cfg, rates::t_star(cfg), 4.0)};
    const std::string csv = report::bayes_csv(checks);
    const auto lines = data_lines(csv);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == report::kBayesHeader);
    CHECK(split_csv_line(lines[1]).size() == 6);
}
