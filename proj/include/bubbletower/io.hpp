#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bubbletower/solver.hpp"

namespace bt {

inline constexpr const char* kToolVersion = "0.1.0";

// 17 significant digits, '.' decimal separator; round-trips bit-exactly.
std::string format_g17(double x);

// LF line endings, header row, g17 numeric formatting.
void write_csv(const std::string& path, std::span<const std::string> header,
               const std::vector<std::vector<double>>& rows);

std::uint64_t fnv1a(std::span<const unsigned char> bytes);
std::uint64_t hash_file(const std::string& path);

struct StudyManifest {
    std::string command;
    std::string resolved_config; // dump_config output + command options
    std::string version = kToolVersion;
    std::string timestamp;       // ISO-8601, informational only
    std::uint64_t config_hash = 0;
    std::vector<std::string> outputs;
};

StudyManifest make_manifest(const std::string& command, const std::string& resolved_config);
void write_manifest(const std::string& path, const StudyManifest& manifest);

// Flat binary snapshot: 6 little-endian f64 header fields
// (n_s, n_theta, n_t, R_max, k, N) then cell values in s-fastest order.
void write_snapshot(const std::string& path, const SectorGrid& grid,
                    std::span<const double> values);

struct Snapshot {
    std::int64_t n_s = 0, n_th = 0, n_t = 0;
    double R_max = 0.0;
    std::int64_t k = 0, N = 0;
    std::vector<double> values;
};

Snapshot read_snapshot(const std::string& path);

// Companion script that plots whichever CSV columns a study produced.
void write_plot_script(const std::string& path, const std::string& csv_name,
                       const std::string& xlabel, const std::string& ylabel, bool loglog);

} // namespace bt
