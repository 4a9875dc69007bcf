#pragma once

#include "nlslab/evolution.hpp"
#include "nlslab/groundstate.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace nlslab {

/// Version string compiled into manifests.
const char* code_version();

/// Reference ground state (n = 512, R = 20, tol 1e-12), computed once.
const GroundState& reference_ground_state();

/// Q on any grid through the band-limited interpolant of the reference.
RadialField ground_state_on(GridPtr g);

// -- experiment description --------------------------------------------------------

struct InitialData {
  enum class Kind { GroundState, Gaussian, PcSoliton, File };
  Kind kind = Kind::GroundState;
  /// Multiplies the base profile when no mass ratio is swept.
  double amplitude = 1.0;
  double width = 1.0;  // gaussian exp(-r^2 / (2 width^2))
  std::string path;    // file
  /// Relative size of a seeded smooth perturbation (0 = none).
  double noise = 0.0;
};

std::string to_string(InitialData::Kind k);
/// Throws std::invalid_argument for unknown names.
InitialData::Kind parse_initial_kind(const std::string& s);

/// One diagnostic with numeric parameters, e.g. "virial:R=20" or
/// "concentration:c=10:last=40".
struct DiagnosticRequest {
  std::string op;
  std::map<std::string, double> params;

  double param(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

/// Known ops: mass, energy, strichartz, scattering, scales, classify, virial,
/// concentration. Throws std::invalid_argument for unknown ops or bad syntax.
DiagnosticRequest parse_diagnostic(const std::string& text);
std::vector<DiagnosticRequest> parse_diagnostic_list(const std::string& comma_separated);

struct ExperimentSpec {
  std::string name = "experiment";
  int grid_n = 512;
  double grid_R = 20.0;
  InitialData initial;
  EvolveConfig evolve;
  std::vector<DiagnosticRequest> diagnostics;
  /// Sweep axes; an empty axis means a single value (amplitude, evolve.mu).
  std::vector<double> mass_ratios;
  std::vector<double> mus;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "nlslab-out";
  int workers = 1;
  /// Write every snapshot as .nlsf (series and diagnostics are always written).
  bool write_snapshots = true;
  /// Bytes the spec was parsed from; the manifest hash is taken over these.
  std::string source;
};

/// Throws std::invalid_argument on malformed JSON, unknown keys or values
/// failing validate().
ExperimentSpec parse_experiment(const std::string& json_text);
ExperimentSpec load_experiment(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentSpec& spec);
void validate(const ExperimentSpec& spec);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a64_hex(std::string_view bytes);

// -- runs and manifest ------------------------------------------------------------

struct RunRecord {
  int index = 0;
  std::string id;   // also the run's subdirectory
  double mass_ratio = 0.0;  // NaN when not swept
  double mu = 0.0;
  std::string status = "pending";  // pending, complete, failed
  std::string termination;
  std::string message;
  double wall_seconds = 0.0;
  std::vector<std::string> artifacts;  // relative to the output directory
  nlohmann::json summary = nlohmann::json::object();
};

struct RunManifest {
  std::string name;
  std::string spec_hash;
  std::string code_version;
  int grid_n = 0;
  double grid_R = 0.0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  bool complete = false;
  std::vector<RunRecord> runs;
  std::vector<std::string> artifacts;  // spec copy and manifest-level files

  /// Every artifact, run-level ones included.
  std::vector<std::string> all_artifacts() const;
};

nlohmann::json to_json(const RunManifest& m);
/// Throws std::runtime_error on malformed input.
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest load_manifest(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it into place.
void write_manifest_atomic(const std::filesystem::path& path, const RunManifest& m);

/// Initial datum of one grid point (mass ratio scales Q-shaped data to
/// ratio * M(Q)).
RadialField initial_datum(const ExperimentSpec& spec, double mass_ratio, int run_index);

/// Runs one diagnostic, writing CSV series into dir (names returned in
/// `written`). Failures are reported as {"error": message, "kind": k} with k
/// one of validation, hypothesis, numeric.
nlohmann::json run_diagnostic(const Trajectory& traj, const DiagnosticRequest& req, const std::filesystem::path& dir,
                              std::vector<std::string>& written);

/// Executes every grid point of the sweep in a worker pool. Each run owns
/// dir/<id>/; the manifest is rewritten atomically after every run and last
/// of all with complete = true. Throws std::invalid_argument before any run
/// when the spec does not validate.
RunManifest run_experiment(const ExperimentSpec& spec);

struct ReportFiles {
  std::vector<std::string> written;
  std::vector<std::string> errors;  // one entry per file that failed
};

/// report.json, summary.csv and SVG line plots (mass, energy, N(t),
/// concentration) under out_dir; run artifacts are read relative to base_dir.
ReportFiles emit_report(const RunManifest& m, const std::filesystem::path& base_dir,
                        const std::filesystem::path& out_dir);

}  // namespace nlslab
