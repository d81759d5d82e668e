#pragma once

#include <string>
#include <vector>

#include "contagion/analysis.hpp"
#include "contagion/model.hpp"
#include "contagion/tables.hpp"

namespace contagion {

/// Shortest decimal that round-trips a double (17 significant digits).
std::string format_float(double value);

/// Comment line placed at the top of every artifact so runs are attributable
/// to their configuration.
std::string artifact_header(std::uint64_t config_hash, std::uint64_t seed);

void write_path_csv(const std::string& filename, const ModelParams& params,
                    const PathRecord& path, const std::string& header);

void write_phi_csv(const std::string& filename, const PhiTable& table,
                   const std::string& header);
PhiTable read_phi_csv(const std::string& filename);

void write_policy_csv(const std::string& filename, const PolicyTable& table,
                      const std::string& header);
PolicyTable read_policy_csv(const std::string& filename);

void write_comparison_csv(const std::string& filename,
                          const ComparisonReport& report,
                          const std::string& header);

void write_strana_csv(const std::string& filename, const StranaReport& report,
                      const std::string& header);

}  // namespace contagion
