#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vnet/types.hpp"

namespace vnet {

// Shortest round-trip decimal form; identical input bits give identical text.
std::string format_double(double v);

inline constexpr const char* kMetricsSchema = "metrics/v1";
inline constexpr const char* kReturnsSchema = "returns/v1";

// Per-episode metrics CSV. The omega column is present for preference-
// conditioned runs only. Deterministic byte-for-byte for a fixed run.
void write_metrics_csv(const std::filesystem::path& path,
                       std::span<const MetricsRecord> records, bool with_omega);

// Wall-clock per episode, kept out of the deterministic metrics file.
void write_timing_csv(const std::filesystem::path& path,
                      std::span<const MetricsRecord> records);

struct ReturnRow {
  std::string label;
  double omega_tran = 0.0;
  double r_tran = 0.0;
  double r_tele = 0.0;
};

void write_returns_csv(const std::filesystem::path& path, std::span<const ReturnRow> rows);
std::vector<ReturnRow> read_returns_csv(const std::filesystem::path& path);

}  // namespace vnet
