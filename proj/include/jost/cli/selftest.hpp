#pragma once
// Invariant suite behind `jostctl selftest`: quadrature identities, projector
// algebra, resolvent and density symmetries, J-factorization, continuation of
// the second-order density and the dispersion relation of the Jost function.

#include <functional>
#include <string>
#include <vector>

namespace jost::cli {

struct CheckResult {
  std::string id;
  std::string group;  // identity, symmetry, factorization, continuation, dispersion
  std::string method;
  double measured = 0;
  double tolerance = 0;
  bool lower_bound = false;  // negative control: passes when measured > tolerance
  bool passed = false;
  std::string detail;
};

struct SelftestOptions {
  double fault = 0;  // kernel perturbation fed to the resolvent-symmetry check
};

CheckResult check_legendre_chi_integral();
CheckResult check_legendre_q_representation();
CheckResult check_integration_reorder();
CheckResult check_projector_orthogonality();
CheckResult check_projector_series();
CheckResult check_gegenbauer_recurrence();
CheckResult check_resolvent_symmetry(double fault = 0);
CheckResult check_density_symmetry();
CheckResult check_cpt();
CheckResult check_factorization();
CheckResult check_continuation();
//! Repulsive and one-bound-state dispersion checks plus the negative control.
std::vector<CheckResult> check_dispersion();

std::vector<CheckResult> run_selftest(const SelftestOptions& opt = {});

}  // namespace jost::cli
