#pragma once

// Seeded end-to-end scenarios with pass/fail verdicts.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gswl/complex.hpp"

namespace gswl {

inline constexpr const char* kVersion = "1.0.0";

enum class Scenario { deform_separation, ect_realization, coboundary_ablation, stability_scan, mantra_suite, recovery_check };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& s);

/// Malformed config; `pointer` is the JSON pointer of the offending field.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(std::string pointer, const std::string& message)
        : std::invalid_argument(pointer + ": " + message), pointer_(std::move(pointer)) {}
    const std::string& pointer() const { return pointer_; }

  private:
    std::string pointer_;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::deform_separation;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> depths{0, 2};
    int directions = 8;
    int thresholds = 10;
    double amplitude = 0.1;
    std::vector<double> deltas{0.04, 0.02, 0.01, 0.005};
    int trials = 20;
    int quadrature = 64;
    int quantization_digits = kDefaultQuantizationDigits;
    std::string output = "reports";

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct CaseResult {
    std::string id;
    bool pass = false;
    std::map<std::string, double> metrics;
    std::string note;
};

struct Report {
    std::string scenario;
    std::vector<CaseResult> cases;  // sorted by id
    nlohmann::json environment;

    bool passed() const;
    nlohmann::json to_json() const;
};

Report run(const ExperimentConfig& config);

/// Writes <scenario>.csv (stable column order) and <scenario>.json into dir.
void report_tables(const Report& report, const std::filesystem::path& dir);

/// CSV text: "case_id,pass,<sorted metric names...>" then one row per case.
std::string report_csv(const Report& report);

}  // namespace gswl
