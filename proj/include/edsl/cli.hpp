#pragma once

// Config ingestion and command dispatch for the edsl front end.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "edsl/potential.hpp"

namespace edsl::cli {

struct SolverSettings {
  double tol = 1e-8;
  double lambda_switch = 0.5;
  double pruefer_tol = 1e-10;
  double accept_margin = 0.1;
  double tau_max = 64.0;
  double contour_tol = 1e-6;
};

struct TaskSettings {
  int n_min = -10;
  int n_max = 10;
  std::vector<int> N_list{10, 20, 40};
  std::vector<cplx> lambda_tests{cplx(0.5, 0.3), cplx(2.0, -1.0), cplx(7.3, 0.8)};
  std::vector<int> M_list{100, 200, 400};
  cplx chain_lambda = 0.0;
  int chain_m = 1;
};

struct RunConfig {
  std::vector<PotentialTerm> p;
  std::vector<PotentialTerm> r;
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  cplx h = 0.0;
  SolverSettings solver;
  TaskSettings task;
  std::string format = "csv";
  std::string out;  // empty: <command>.<format> in the working directory

  Problem problem() const;
};

// Throws InvalidInput naming the offending field as a JSON pointer.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
// Canonical JSON with every default filled in.
std::string dump_config(const RunConfig& config);
// FNV-1a of the canonical dump, hex.
std::string config_hash(const RunConfig& config);

const std::vector<std::string>& commands();

struct RunOptions {
  std::optional<std::string> out;
  std::optional<std::string> format;
  bool verbose = false;
};

// Runs one command and writes the artifact plus <artifact>.meta.json.
// Returns 0 on success, 2 on validation errors, 3 on numerical failures;
// the summary line goes to out, diagnostics to err.
int run(const std::string& command, const RunConfig& config, const RunOptions& opt, std::ostream& out,
        std::ostream& err);
// Same, loading the config first (load failures return 2).
int run(const std::string& command, const std::string& config_path, const RunOptions& opt, std::ostream& out,
        std::ostream& err);

}  // namespace edsl::cli
