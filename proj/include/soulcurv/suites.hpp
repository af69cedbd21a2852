#pragma once

#include <string>
#include <vector>

#include "soulcurv/report.hpp"

namespace soulcurv {

struct SuiteOutput {
    Report report;
    std::vector<CsvTable> tables;
};

// The five CLI suites. verify-example runs everything and is the acceptance
// surface; the others are focused subsets sharing the same check ids.
SuiteOutput run_verify_example(const SuiteConfig& cfg);
SuiteOutput run_rigidity_scan(const SuiteConfig& cfg);
SuiteOutput run_connection_sweep(const SuiteConfig& cfg);
SuiteOutput run_holonomy(const SuiteConfig& cfg);
SuiteOutput run_curvature_min(const SuiteConfig& cfg);

SuiteOutput run_suite(const std::string& command, const SuiteConfig& cfg);

} // namespace soulcurv
