#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fpuwave/io.hpp"

namespace fpuwave {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    json metrics = json::object();
    double seconds = 0.0;
};

struct VerifyReport {
    std::string config_hash;
    std::vector<CriterionResult> criteria;
    bool all_passed() const;
};

struct VerifyOptions {
    // Throw on the first stage error instead of recording a failed criterion.
    bool stop_on_error = true;
    std::function<void(const CriterionResult&)> on_result;
};

VerifyReport run_verification(const ExperimentConfig& cfg, const VerifyOptions& opt = {});
json to_json(const VerifyReport& report);
std::string format_line(const CriterionResult& r);

// Angular frequency of a sampled oscillation from its zero crossings.
double zero_crossing_frequency(const std::vector<double>& t, const std::vector<double>& x);

}  // namespace fpuwave
