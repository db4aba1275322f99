#pragma once

#include <string>

#include <json.hpp>

#include "elliptope/decompose.hpp"
#include "elliptope/ellipsoid.hpp"
#include "elliptope/montecarlo.hpp"
#include "elliptope/partition.hpp"
#include "elliptope/realizability.hpp"

namespace elliptope::harness {

// Machine-readable reports. Matrices are embedded as CSV strings in the
// shared format (rows separated by newlines). Serialization goes through
// nlohmann::json with sorted keys, so parse -> dump round-trips byte for
// byte.

nlohmann::json decomposition_report(const decompose::DecompositionResult& r, double rank_tol,
                                    bool partitioned);
nlohmann::json realizability_report(const faces::RealizabilityReport& r);
nlohmann::json fit_report(const ellipsoid::FitResult& r);
nlohmann::json montecarlo_report(const MonteCarloReport& r, const ExperimentConfig& cfg);

/// Partition file schema: {"n": int, "blocks": [[int, ...], ...]} with
/// 1-based indices.
numerics::Partition parse_partition_json(const std::string& text);
numerics::Partition read_partition_file(const std::string& path);

std::string grid_csv(const std::vector<ellipsoid::GridRow>& rows);

} // namespace elliptope::harness
