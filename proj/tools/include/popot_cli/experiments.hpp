#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "popot/checks.hpp"
#include "popot/dual.hpp"
#include "popot_cli/config.hpp"

namespace popot::cli {

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
};

struct OutputFile {
  std::string name;
  std::string content;
};

/// What a command produced: exit code (0 pass, 2 failed check), data files
/// and the summary document.
struct CommandResult {
  int exit_code = 0;
  std::vector<OutputFile> files;
  json summary;
  /// Human-readable lines for stdout.
  std::string report;
};

// validate-a

CommandResult cmd_validate_a(const json& config, const Overrides& over);

// contract

struct ContractOptions {
  json model;
  json first;
  json second;
  std::optional<GridSpec> grid;
  std::size_t n_particles = 100000;
  double horizon = 1.0;
  std::size_t checkpoints = 10;
  /// Atoms per initial cloud and pairs per checkpoint used for exact OT.
  std::size_t ot_atoms = 500;
  double lookahead = 0.1;
  unsigned workers = 1;
  /// Independent replicas sharing n_particles; 32 by default for the
  /// sexual model, 1 otherwise.
  std::optional<std::size_t> replicas;
  /// Required fraction of pairs with at least one event by the horizon.
  double min_touched = 0.8;
  /// Also simulate both populations independently and compare marginals.
  bool marginal_test = false;
  double significance = 0.001;
  std::uint64_t seed = 0;
};

ContractOptions parse_contract(const json& config, const Overrides& over);

struct ContractRow {
  double time = 0;
  double exact_ot = 0;
  /// Mean cost of the pairs whose marginals entered exact_ot.
  double paired_cost = 0;
  double mean_cost = 0;
  double stderr_cost = 0;
  std::size_t n_pairs = 0;
  std::uint64_t common_events = 0;
  std::uint64_t solo_events = 0;
  double touched = 0;
};

struct MarginalTest {
  double p_first = 1;
  double p_second = 1;
  bool rejected = false;
};

struct ContractResult {
  std::string model;
  double a = 0;
  bool a_auto = false;
  double initial_ot = 0;
  std::size_t replicas = 1;
  std::vector<ContractRow> rows;
  /// exact_ot <= paired_cost + 1e-10 everywhere (structural bound).
  bool coupling_bound = true;
  /// exact_ot <= mean_cost + 1e-10 everywhere. Diagnostic only: exact_ot
  /// comes from a subsample, so this compares two different particle sets.
  bool ot_below_mean = true;
  /// Consecutive means never rise by more than 3 combined standard errors.
  bool monotone = true;
  /// No mean exceeds the initial one by more than 3 combined standard errors.
  bool contraction = true;
  bool touched_ok = true;
  /// Largest rise between consecutive checkpoints in units of the combined
  /// standard error.
  double worst_rise_sigma = 0;
  std::optional<MarginalTest> marginals;
  bool passed() const {
    return coupling_bound && monotone && contraction && touched_ok &&
           (!marginals || !marginals->rejected);
  }
};

ContractResult run_contract(const ContractOptions& opts);
CommandResult cmd_contract(const json& config, const Overrides& over);

// sweep

struct SweepOptions {
  std::vector<json> models;
  std::optional<GridSpec> grid;
  std::size_t samples = 100000;
  double box_hi = 10.0;
  std::uint64_t seed = 0;
};

SweepOptions parse_sweep(const json& config, const Overrides& over);
std::vector<SweepResult> run_sweep(const SweepOptions& opts);
CommandResult cmd_sweep(const json& config, const Overrides& over);

// dual-check

/// Smooth bump A * phi((x - x0) / rx) * phi((t - t0) / rt) with
/// phi(u) = (1 - u^2)^4 on |u| < 1.
SourceFunction bump_source(double amplitude, double x0, double rx, double t0, double rt);

struct DualOptions {
  DualProblem problem;
  std::vector<double> u0_atoms;
  std::vector<double> u0_weights;
  std::size_t n_particles = 100000;
  double h_t = 0.01;
  /// Discretization allowance; negative selects the automatic estimate
  /// 4 |rhs(h) - rhs(h / 2)|.
  double budget = -1;
  unsigned workers = 1;
  std::uint64_t seed = 0;
};

DualOptions parse_dual(const json& config, const Overrides& over);
struct DualRun {
  DualSolution solution;
  DualityCheck check;
};
DualRun run_dual(const DualOptions& opts);
CommandResult cmd_dual_check(const json& config, const Overrides& over);

// ot

struct OtOptions {
  std::string mu_file;
  std::string nu_file;
  std::string cost = "trunc_abs";
  double a = 1.0;
  double p = 1.0;
  std::optional<std::string> space;
  bool plan = false;
};

CommandResult cmd_ot(const OtOptions& opts);

/// Reads an atom-weight CSV (coordinates..., weight; optional header).
std::vector<std::vector<double>> read_atom_csv(const std::string& file);

// output

/// Shortest round-trip text for a double.
std::string format_number(double v);

/// SHA-256 of the canonical JSON text.
std::string config_hash(const json& config);

/// Git blob object id (SHA-1 of "blob <size>\0" + content).
std::string git_blob_hash(const std::string& content);

/// Writes every file plus summary.json to `dir`, recording the config hash
/// and the content hash of each file in the summary.
void write_outputs(const std::string& dir, CommandResult& result, const json& config);

}  // namespace popot::cli
