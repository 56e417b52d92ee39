#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delone/metrics.hpp"

namespace delone {

struct ConstantBundle {
  int n = 2;
  std::string mode = "practical";  // "paper" or "practical"
  std::string metric = "flat:2";
  std::string Cn;  // exact decimal
  double eps0 = 0.0, eps1 = 0.0, eps2 = 0.0, eps3 = 0.0, eps4 = 0.0;
  double rF = 1.0;
  double r_star = 1.0;
  std::array<double, 6> d{};  // d1, d1', d1'', d2'', d2', d2
  std::vector<std::pair<double, double>> rho_hat;  // (rho_k, rho'_k), k = 0..n+1
  std::map<std::string, double> v2;                // "e1,e2" -> V2 lower bound
  double gs_delta = 0.0;                           // delta_n(eps4) from the Gram-Schmidt audit
  double lambda_eps0 = 0.0;
  double dFU = 1.0;
  double lF = 0.0;  // 0 means unbounded
  int eps0_binding = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> provenance;

  double d1() const { return d[0]; }
  double d1p() const { return d[1]; }
  double d1pp() const { return d[2]; }
  double d2pp() const { return d[3]; }
  double d2p() const { return d[4]; }
  double d2() const { return d[5]; }
};

/// Sum_{k=1}^{n+1} binom(10^n, k), exact, as a decimal string.
std::string compute_Cn(int n);

struct EpsLadder {
  double eps1, eps2, eps3;
};
EpsLadder compute_eps_ladder(int n);

/// (rho_hat_k, rho_hat'_k) for k = 0..n+2 (the last pair is used only as the
/// lower target in the k = n+1 inequality).
std::vector<std::pair<double, double>> rho_hat_ladder(int n, double eps2);

/// Slack of the 2n+2 inequalities at eps4; all entries > 0 iff they hold.
std::vector<double> eps4_slacks(int n, double eps2, double eps4);

/// Largest eps4 found by bisection satisfying every inequality. Throws NoSolution.
double compute_eps4(int n, double eps2);

struct Eps0Inputs {
  int n;
  double eps1, eps2, eps3, eps4, gs_delta;
};

/// Upper limits of the eight constraints, paired with strictness.
std::vector<std::pair<double, bool>> eps0_limits(const Eps0Inputs& in);

/// Ids (1..8) of constraints violated by eps0.
std::vector<int> eps0_violations(const Eps0Inputs& in, double eps0);

/// Largest eps0 = 2^-k satisfying all constraints; binding receives the id of
/// the constraint that rejected 2 eps0.
double compute_eps0(const Eps0Inputs& in, int* binding = nullptr);

/// min{dFU, lF/5, lambda, 1}; lF <= 0 means unbounded.
double compute_rF(double lambda_eps0, double dFU, double lF);

/// (.10, .11, .12, .18, .19, .20) * rF.
std::array<double, 6> d_ladder(double rF);

/// Largest radius in {cap, 1/2, 1/4, ..., 2^-depth, 0} with var and div <= eps0 rF.
double compute_r_star(const TransportFamily& fam, double eps0, double rF, int depth, double cap = 1.0);

struct BundleRequest {
  int n = 2;
  std::string mode = "practical";
  std::string metric;  // defaults to flat:n
  std::optional<double> eps0, eps1, eps2, eps3, eps4;
  double dFU = 1.0;
  double lF = 0.0;
  std::uint64_t seed = 0;
};

/// Builds and validates a bundle. Practical mode fills missing entries with
/// the defaults eps1 = 1e-6, eps2 = 1e-5, eps3 = eps1/10 and computed eps4, eps0.
/// Throws ValidationError when a supplied tuple violates the inequality system.
ConstantBundle make_bundle(const BundleRequest& req);

/// Re-checks every bundle invariant. Throws ValidationError naming the first violation.
void validate_bundle(const ConstantBundle& b);

}  // namespace delone
