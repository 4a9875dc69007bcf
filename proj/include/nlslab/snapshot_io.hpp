#pragma once

#include "nlslab/evolution.hpp"
#include "nlslab/radial_spectral.hpp"

#include <json.hpp>

#include <filesystem>

namespace nlslab {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Writes a field snapshot:
///   "NLSF" | u32 version | u32 n | f64 R | n x (f64 re, f64 im), all little-endian,
/// plus `<path>.json` holding grid metadata and `provenance`.
void write_snapshot(const std::filesystem::path& path, const RadialField& f,
                    const nlohmann::json& provenance = nlohmann::json::object());

/// Reads a snapshot and rebuilds (or reuses) its grid. Throws std::runtime_error
/// on bad magic, unknown version or truncated data.
RadialField read_snapshot(const std::filesystem::path& path);

/// Raw header fields without building the grid.
struct SnapshotHeader {
  std::uint32_t version;
  std::uint32_t n;
  double R;
};
SnapshotHeader read_snapshot_header(const std::filesystem::path& path);

/// Trajectory directory: trajectory.json (run metadata and snapshot index),
/// series.csv (per-step records, %.17g) and snapshots/snap_NNNNN.nlsf.
/// Returns the paths written, relative to dir.
std::vector<std::string> write_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                                          const nlohmann::json& provenance = nlohmann::json::object());
/// Throws std::runtime_error for a missing or malformed directory.
Trajectory read_trajectory(const std::filesystem::path& dir);

/// CSV with a header row; numbers printed with %.17g.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace nlslab
