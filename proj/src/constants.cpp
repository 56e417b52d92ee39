#include "delone/constants.hpp"

#include <gmpxx.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "delone/errors.hpp"
#include "delone/robustness.hpp"

namespace delone {

std::string compute_Cn(int n) {
  if (n < 1 || n > 8) throw std::invalid_argument("n must be in 1..8");
  mpz_class big;
  mpz_ui_pow_ui(big.get_mpz_t(), 10, static_cast<unsigned long>(n));
  mpz_class sum = 0, term = 1;
  for (int k = 1; k <= n + 1; ++k) {
    // term = binom(big, k) built incrementally; the division is exact.
    term = term * (big - (k - 1)) / k;
    sum += term;
  }
  return sum.get_str();
}

EpsLadder compute_eps_ladder(int n) {
  const double cn = mpf_class(mpz_class(compute_Cn(n))).get_d();
  const double nn = n;
  const double eps1 = 1.0 / (cn * 1000.0 * nn * std::pow(100.0, nn));
  const double eps2 = 1.0 / (cn * 2000.0 * std::pow(2.0, nn));
  return EpsLadder{eps1, eps2, eps1 / 10.0};
}

std::vector<std::pair<double, double>> rho_hat_ladder(int n, double eps2) {
  std::vector<std::pair<double, double>> out;
  const double nn = n;
  for (int k = 0; k <= n + 2; ++k)
    out.emplace_back((18.0 - 2.0 * k / (3.0 * nn)) * eps2, (18.0 - (2.0 * k + 1.0) / (3.0 * nn)) * eps2);
  return out;
}

std::vector<double> eps4_slacks(int n, double eps2, double eps4) {
  const auto h = rho_hat_ladder(n, eps2);
  std::vector<double> slack;
  auto rho_n = [&](double rho0) {
    try {
      return rho_m_recursion(rho0, 10.0 * eps4, 1.0, 2.0, n);
    } catch (const InvalidBudget&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  for (int k = 1; k <= n + 1; ++k) {
    const double a = rho_n(h[k].first);
    slack.push_back(h[k].first - a);
    slack.push_back(a - (h[k].second + eps2 / 100.0));
    const double b = rho_n(h[k].second);
    slack.push_back(h[k].second - b);
    slack.push_back(b - (h[k + 1].first + eps2 / 100.0));
  }
  return slack;
}

namespace {

bool all_positive(const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0.0)) return false;
  return true;
}

}  // namespace

double compute_eps4(int n, double eps2) {
  double lo = 0.0, hi = eps2;
  if (all_positive(eps4_slacks(n, eps2, hi))) throw NoSolution("eps4 search interval too small");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (all_positive(eps4_slacks(n, eps2, mid)) ? lo : hi) = mid;
  }
  if (!(lo > 0.0) || !all_positive(eps4_slacks(n, eps2, lo))) throw NoSolution("no admissible eps4");
  return lo;
}

std::vector<std::pair<double, bool>> eps0_limits(const Eps0Inputs& in) {
  const double nn = in.n;
  const double brace = 1.0 + 35.0 * std::pow(nn, 1.5) * std::pow(4.0 / (15.0 * in.eps2), nn - 1.0);
  return {
      {1.0 / 2000.0, true},
      {50.0 * nn * std::pow(0.4, nn) * in.eps1, false},
      {in.eps2 / 2000.0, true},
      {in.eps3 / 4.0, true},
      {in.eps1 / 2.0, true},
      {in.eps3 / (2.0 * brace), true},
      {in.eps4 / 20.0, true},
      {in.gs_delta / 100.0, true},
  };
}

std::vector<int> eps0_violations(const Eps0Inputs& in, double eps0) {
  std::vector<int> bad;
  const auto lim = eps0_limits(in);
  if (!(eps0 > 0.0)) bad.push_back(0);
  for (std::size_t i = 0; i < lim.size(); ++i) {
    const bool ok = lim[i].second ? eps0 < lim[i].first : eps0 <= lim[i].first;
    if (!ok) bad.push_back(static_cast<int>(i) + 1);
  }
  return bad;
}

double compute_eps0(const Eps0Inputs& in, int* binding) {
  double e = 1.0;
  for (int k = 0; k < 2000; ++k) {
    if (eps0_violations(in, e).empty()) {
      if (binding) {
        const auto bad = eps0_violations(in, 2.0 * e);
        *binding = bad.empty() ? 0 : bad.front();
      }
      return e;
    }
    e *= 0.5;
    if (e == 0.0) break;
  }
  throw NoSolution("no admissible eps0");
}

double compute_rF(double lambda_eps0, double dFU, double lF) {
  double r = std::min({dFU, lambda_eps0, 1.0});
  if (lF > 0.0) r = std::min(r, lF / 5.0);
  return r;
}

std::array<double, 6> d_ladder(double rF) {
  return {0.10 * rF, 0.11 * rF, 0.12 * rF, 0.18 * rF, 0.19 * rF, 0.20 * rF};
}

double compute_r_star(const TransportFamily& fam, double eps0, double rF, int depth, double cap) {
  const auto profile = var_div_profile(fam);
  auto at = [&](double r) {
    VarDiv out;
    for (const auto& [d, vd] : profile)
      if (d <= r) out = vd;
    return out;
  };
  const double lim = eps0 * rF;
  std::vector<double> radii{cap};
  for (int k = 1; k <= depth; ++k) radii.push_back(std::ldexp(1.0, -k));
  radii.push_back(0.0);
  for (double r : radii) {
    const VarDiv vd = at(r);
    if (vd.var <= lim && vd.div <= lim) return r;
  }
  return 0.0;
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

ConstantBundle make_bundle(const BundleRequest& req) {
  if (req.n < 1 || req.n > 8) throw ValidationError("n must be in 1..8");
  if (req.mode != "paper" && req.mode != "practical") throw ValidationError("mode must be paper or practical");
  ConstantBundle b;
  b.n = req.n;
  b.mode = req.mode;
  b.metric = req.metric.empty() ? "flat:" + std::to_string(req.n) : req.metric;
  const MetricModel metric = MetricModel::parse(b.metric);
  if (metric.leaf_dim() != b.n) throw ValidationError("metric leaf dimension differs from n");
  b.Cn = compute_Cn(req.n);
  b.seed = req.seed;
  b.dFU = req.dFU;
  b.lF = req.lF;
  if (req.mode == "paper") {
    if (req.eps0 || req.eps1 || req.eps2 || req.eps3 || req.eps4)
      throw ValidationError("paper mode does not accept an eps tuple");
    const EpsLadder l = compute_eps_ladder(req.n);
    b.eps1 = l.eps1;
    b.eps2 = l.eps2;
    b.eps3 = l.eps3;
  } else {
    b.eps1 = req.eps1.value_or(1e-6);
    b.eps2 = req.eps2.value_or(1e-5);
    b.eps3 = req.eps3.value_or(b.eps1 / 10.0);
  }
  if (!(b.eps1 > 0.0 && b.eps2 > 0.0 && b.eps3 > 0.0)) throw ValidationError("eps entries must be positive");
  b.eps4 = req.eps4 ? *req.eps4 : compute_eps4(req.n, b.eps2);
  b.gs_delta = gram_schmidt_delta(req.n, b.eps4, req.seed);
  const Eps0Inputs in{req.n, b.eps1, b.eps2, b.eps3, b.eps4, b.gs_delta};
  b.eps0 = req.eps0 ? *req.eps0 : compute_eps0(in, &b.eps0_binding);
  b.lambda_eps0 = find_lambda_eps(metric, b.eps0, 1.0);
  b.rF = compute_rF(b.lambda_eps0, b.dFU, b.lF);
  b.d = d_ladder(b.rF);
  b.r_star = 1.0;
  const auto h = rho_hat_ladder(req.n, b.eps2);
  b.rho_hat.assign(h.begin(), h.begin() + req.n + 2);
  b.v2["1,2"] = v2_constant(1.0, 2.0, req.seed);
  b.provenance = {
      {"Cn", "sum_{k=1}^{n+1} binom(10^n, k)"},
      {"eps1", req.mode == "paper" ? "1/(Cn*1000*n*100^n)" : "supplied or 1e-6"},
      {"eps2", req.mode == "paper" ? "1/(Cn*2000*2^n)" : "supplied or 1e-5"},
      {"eps3", "eps1/10"},
      {"eps4", req.eps4 ? "supplied" : "bisection on rho_n(rho_hat, 10 eps4) margins, (e1,e2)=(1,2)"},
      {"eps0", req.eps0 ? "supplied" : "largest 2^-k meeting constraints 1..8"},
      {"gs_delta", "sampled Gram-Schmidt deviation, bisection, safety 1/2"},
      {"rF", "min{dFU, lF/5, lambda_eps0, 1}"},
      {"d", "(.10,.11,.12,.18,.19,.20)*rF"},
      {"rho_hat", "(18 - 2k/3n) eps2, (18 - (2k+1)/3n) eps2"},
      {"v2", "0.9 * sampled minimum with Nelder-Mead refinement"},
      {"lambda_eps0", fmt(b.lambda_eps0)},
  };
  validate_bundle(b);
  return b;
}

void validate_bundle(const ConstantBundle& b) {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (b.n < 1 || b.n > 8) fail("n: must be in 1..8");
  if (b.mode != "paper" && b.mode != "practical") fail("mode: must be paper or practical");
  if (b.Cn != compute_Cn(b.n)) fail("Cn: does not match n");
  for (double e : {b.eps0, b.eps1, b.eps2, b.eps3, b.eps4})
    if (!(e > 0.0) || !std::isfinite(e)) fail("eps: entries must be positive and finite");
  if (b.mode == "paper") {
    const EpsLadder l = compute_eps_ladder(b.n);
    if (b.eps1 != l.eps1 || b.eps2 != l.eps2 || b.eps3 != l.eps3) fail("eps: paper ladder mismatch");
  }
  if (!(b.eps3 < b.eps1 / 4.0)) fail("eps3: require eps3 < eps1/4");
  const auto s = eps4_slacks(b.n, b.eps2, b.eps4);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!(s[i] > 0.0)) fail("eps4: inequality " + std::to_string(i) + " of the rho_hat margins fails");
  const auto bad = eps0_violations({b.n, b.eps1, b.eps2, b.eps3, b.eps4, b.gs_delta}, b.eps0);
  if (!bad.empty()) fail("eps0: constraint " + std::to_string(bad.front()) + " fails");
  if (!(b.rF > 0.0 && b.rF <= 1.0)) fail("rF: must be in (0, 1]");
  const auto d = d_ladder(b.rF);
  for (int i = 0; i < 6; ++i)
    if (std::abs(b.d[i] - d[i]) > 1e-15 * b.rF) fail("d: ladder does not match rF");
  for (int i = 0; i + 1 < 6; ++i)
    if (!(b.d[i] < b.d[i + 1])) fail("d: ladder not increasing");
  if (std::abs(b.d[5] - 2.0 * b.d[0]) > 1e-15 * b.rF) fail("d: require d2 = 2 d1");
  if (b.rho_hat.size() != static_cast<std::size_t>(b.n + 2)) fail("rho_hat: expected n+2 pairs");
  if (b.rho_hat.front().first != 18.0 * b.eps2) fail("rho_hat: must start at 18 eps2");
  double prev = INFINITY;
  for (const auto& [r, rp] : b.rho_hat) {
    if (!(r < prev && rp < r)) fail("rho_hat: ladder not strictly decreasing");
    prev = rp;
  }
  if (!(prev > 15.0 * b.eps2)) fail("rho_hat: ladder must stay above 15 eps2");
  if (!(b.r_star >= 0.0)) fail("r_star: must be nonnegative");
}

}  // namespace delone
