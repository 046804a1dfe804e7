#pragma once

#include "mixlab/analyzer.hpp"

#include <string>
#include <vector>

namespace mixlab {

/// Stamp embedded in every emitted file: tool version plus a hash of the
/// run configuration, so identical configs produce byte-identical outputs.
struct OutputStamp {
  std::string config_hash = "0000000000000000";
  std::string version = kToolVersion;
};

/// CSV columns: n, value_num, value_den, err_num, err_den (normalized values).
void write_correlation_csv(const CorrelationReport& report, const std::string& path,
                           const OutputStamp& stamp);

/// Human-readable summary: measures, verdict lines, band decay, assumptions.
void write_correlation_summary(const CorrelationReport& report,
                               const std::vector<std::string>& verdict_lines,
                               const std::string& path, const OutputStamp& stamp);

/// Static log-scale decay plot (deviation vs n).
void write_decay_svg(const CorrelationReport& report, const std::string& path,
                     const OutputStamp& stamp);

}  // namespace mixlab
