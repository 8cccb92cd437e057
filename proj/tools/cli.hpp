#pragma once

#include "fairlens/data.hpp"
#include "fairlens/metrics.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fairlens::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInternal = 3 };

/// Full-precision audit of one protected attribute. Undefined metrics are empty.
struct AttributeAudit {
    std::string protected_name;
    Index n_disadvantaged = 0;
    Index n_advantaged = 0;
    std::optional<metrics::MetricResult> mean_difference;
    std::optional<metrics::MetricResult> normalized_mean_difference;
    std::optional<double> max_mean_difference;
    std::optional<double> consistency;
    std::optional<double> situation_test_score;
};

[[nodiscard]] AttributeAudit audit_attribute(const Dataset& data, Index neighbors = metrics::kDefaultNeighbors);

/// Parses argv and runs the subcommand. Human-readable output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fairlens::cli
