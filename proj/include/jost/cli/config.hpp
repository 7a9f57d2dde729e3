#pragma once
// Run configuration of the command-line front end: flat key = value text with
// [section] headers.

#include "jost/engine.hpp"
#include "jost/oracle.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace jost::cli {

//! Validation failure tied to a config line (0 when the field is missing).
struct ConfigError : std::runtime_error {
  ConfigError(int line, std::string field, const std::string& what);
  int line;
  std::string field;
};

struct ComplexRange {
  double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;
  int re_n = 0, im_n = 0;
  bool empty() const { return re_n == 0 || im_n == 0; }
};

struct RunConfig {
  Interaction interaction;
  std::string weight_source = "inline";
  int N = 3;
  std::vector<Channel> channels;

  std::vector<double> k;  // real momenta
  ComplexRange b;         // complex b rectangle
  Sign sheet = Sign::plus();
  bool with_oracle = true;

  double bound_lo = 0.01, bound_hi = 5.0;
  int bound_scan = 400;

  std::vector<double> q;  // off-shell momenta of the amplitude table
  int amplitude_order = 2;

  double kernel_rho = 1.0;
  std::vector<double> kernel_u;

  double tol_phase = 1e-4;
  double tol_unitarity = 1e-8;
  double tol_bound = 1e-4;

  SolverConfig solver;
  OdeConfig ode;

  std::filesystem::path output_dir = ".";
  std::string output_name;  // default: the subcommand name

  std::uint64_t hash = 0;                        // of the canonical key = value list
  std::map<std::string, std::string> canonical;  // section.key -> raw value

  //! Cross-field checks (channels valid for N, positive tolerances, ...).
  void validate() const;
};

//! Parse from text; relative weight paths resolve against base_dir.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

//! 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

}  // namespace jost::cli
