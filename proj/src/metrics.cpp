#include "vnet/metrics.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vnet {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // fixed newlines on every platform
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) fields.push_back(cur);
  return fields;
}

}  // namespace

void write_metrics_csv(const std::filesystem::path& path,
                       std::span<const MetricsRecord> records, bool with_omega) {
  std::ofstream out = open_out(path);
  out << "# " << kMetricsSchema << "\n";
  out << "episode,r_tran,r_tele,delta_e,xi_e";
  if (with_omega) out << ",omega_tran";
  out << "\n";
  for (const auto& r : records) {
    out << r.episode << ',' << format_double(r.r_tran) << ',' << format_double(r.r_tele) << ','
        << format_double(r.delta_e) << ',' << format_double(r.xi_e);
    if (with_omega) out << ',' << format_double(r.omega_tran);
    out << "\n";
  }
}

void write_timing_csv(const std::filesystem::path& path,
                      std::span<const MetricsRecord> records) {
  std::ofstream out = open_out(path);
  out << "episode,wall_ms_per_step\n";
  for (const auto& r : records) out << r.episode << ',' << format_double(r.wall_ms) << "\n";
}

void write_returns_csv(const std::filesystem::path& path, std::span<const ReturnRow> rows) {
  std::ofstream out = open_out(path);
  out << "# " << kReturnsSchema << "\n";
  out << "label,omega_tran,r_tran,r_tele\n";
  for (const auto& r : rows) {
    out << r.label << ',' << format_double(r.omega_tran) << ',' << format_double(r.r_tran)
        << ',' << format_double(r.r_tele) << "\n";
  }
}

std::vector<ReturnRow> read_returns_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open returns CSV: " + path.string());
  std::vector<ReturnRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "label,omega_tran,r_tran,r_tele")
        throw std::runtime_error("unexpected returns CSV header in " + path.string());
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw std::runtime_error("malformed returns CSV row in " + path.string() + ": " + line);
    ReturnRow row;
    row.label = fields[0];
    row.omega_tran = std::stod(fields[1]);
    row.r_tran = std::stod(fields[2]);
    row.r_tele = std::stod(fields[3]);
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw std::runtime_error("empty returns CSV: " + path.string());
  return rows;
}

}  // namespace vnet
