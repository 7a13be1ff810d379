#pragma once

// Similarity measures between blends and the individual attractors:
// blending coefficients, self-dissimilarity, the coefficient bound check and
// covering radii of the blend attractor.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "blendifs/blend.hpp"
#include "blendifs/error.hpp"
#include "blendifs/grid.hpp"
#include "blendifs/hausdorff.hpp"
#include "blendifs/ifs.hpp"

namespace blendifs {

inline std::vector<double> system_lambdas(const BlendSystem& sys) {
  std::vector<double> out;
  out.reserve(sys.size());
  for (const auto& s : sys.systems()) out.push_back(s.lambda_r());
  return out;
}

namespace detail {

inline void check_lambdas(std::span<const double> lambdas) {
  if (lambdas.empty()) throw Error(ErrorKind::EmptyInput, "no contractivity constants given");
  for (double l : lambdas) {
    if (!(l > 0.0 && l < 1.0)) {
      throw Error(ErrorKind::LambdaOutOfRange, "contractivity constant " + std::to_string(l) + " not in (0, 1)");
    }
  }
}

inline void check_beta_args(const BlendingSequence& theta, std::span<const double> lambdas, int i) {
  check_lambdas(lambdas);
  const int n = static_cast<int>(lambdas.size());
  if (i < 1 || i > n) {
    throw Error(ErrorKind::SymbolOutOfRange, "system index " + std::to_string(i) + " not in 1.." + std::to_string(n));
  }
  if (theta.max_symbol() > n) {
    throw Error(ErrorKind::SymbolOutOfRange,
                "theta symbol " + std::to_string(theta.max_symbol()) + " not in 1.." + std::to_string(n));
  }
}

}  // namespace detail

struct BetaInterval {
  double lower = 0.0;
  double upper = 0.0;
  double tail_bound = 0.0;
};

/// Blending coefficient in its defining form,
///   beta = gamma_1 + sum_{k >= 2, theta_k != i} gamma_k,  gamma_k = prod_{j < k} lambda_{theta_j},
/// truncated to the finite theta. The unknown continuation contributes at most
/// gamma_{|theta|+1} / (1 - lambda_max), which is added to form `upper`.
inline BetaInterval beta_definition(const BlendingSequence& theta, std::span<const double> lambdas, int i) {
  detail::check_beta_args(theta, lambdas, i);
  const auto& syms = theta.symbols();
  double gamma = 1.0;  // gamma_1
  double lower = 1.0;
  for (std::size_t k = 1; k < syms.size(); ++k) {
    gamma *= lambdas[static_cast<std::size_t>(syms[k - 1] - 1)];
    if (syms[k] != i) lower += gamma;
  }
  gamma *= lambdas[static_cast<std::size_t>(syms.back() - 1)];
  const double lam_max = *std::max_element(lambdas.begin(), lambdas.end());
  BetaInterval out;
  out.lower = lower;
  out.tail_bound = gamma / (1.0 - lam_max);
  out.upper = lower + out.tail_bound;
  return out;
}

inline BetaInterval beta_definition(const BlendingSequence& theta, const BlendSystem& sys, int i) {
  const auto lambdas = system_lambdas(sys);
  return beta_definition(theta, lambdas, i);
}

/// Variant with the product running through k and every term conditioned:
///   beta = 1 + sum_{k >= 1, theta_k != i} prod_{m <= k} lambda_{theta_m}.
inline double beta_examples(const BlendingSequence& theta, std::span<const double> lambdas, int i) {
  detail::check_beta_args(theta, lambdas, i);
  double prod = 1.0;
  double beta = 1.0;
  for (int s : theta.symbols()) {
    prod *= lambdas[static_cast<std::size_t>(s - 1)];
    if (s != i) beta += prod;
  }
  return beta;
}

inline double beta_examples(const BlendingSequence& theta, const BlendSystem& sys, int i) {
  const auto lambdas = system_lambdas(sys);
  return beta_examples(theta, lambdas, i);
}

struct BetaEntry {
  int system = 0;  // 1-based
  double beta_def_lower = 0.0;
  double beta_def_upper = 0.0;
  double beta_examples = 0.0;
};

struct BetaReport {
  BlendingSequence theta;
  std::vector<BetaEntry> entries;
  double tail_bound = 0.0;
};

inline BetaReport beta_report(const BlendingSequence& theta, std::span<const double> lambdas) {
  BetaReport r{theta, {}, 0.0};
  for (int i = 1; i <= static_cast<int>(lambdas.size()); ++i) {
    const auto def = beta_definition(theta, lambdas, i);
    r.entries.push_back({i, def.lower, def.upper, beta_examples(theta, lambdas, i)});
    r.tail_bound = def.tail_bound;
  }
  return r;
}

/// Discrete attractors A_i, each the constant-theta blend of depth `depth`
/// started from the full grid.
inline std::vector<DiscreteSet> compute_attractors(const BlendSystem& sys, const Grid& g, int depth,
                                                   ExecOptions exec = {}) {
  std::vector<DiscreteSet> out;
  out.reserve(sys.size());
  for (int i = 1; i <= static_cast<int>(sys.size()); ++i) {
    const auto theta = BlendingSequence::constant(i, static_cast<std::size_t>(depth));
    out.push_back(blend_approx(sys, g, theta, exec).output);
  }
  return out;
}

/// delta_{i0} = max_i d_H(F_i(A_{i0}), A_{i0}) on the grid.
inline double delta_self_dissimilarity(const BlendSystem& sys, const Grid& g, int i0, const DiscreteSet& attractor_i0,
                                       ExecOptions exec = {}) {
  if (attractor_i0.empty()) throw Error(ErrorKind::EmptyInput, "attractor approximation is empty");
  (void)sys.system(i0);  // range check
  const DistanceField to_attractor(attractor_i0, exec);
  double delta = 0.0;
  for (const auto& ifs : sys.systems()) {
    const DiscreteSet image = hb_apply_discrete(g, ifs, attractor_i0, exec);
    const double there = to_attractor.max_over(image);
    const double back = DistanceField(image, exec).max_over(attractor_i0);
    delta = std::max({delta, there, back});
  }
  return delta;
}

inline double delta_self_dissimilarity(const BlendSystem& sys, const Grid& g, int i0,
                                       std::span<const DiscreteSet> attractors, ExecOptions exec = {}) {
  (void)sys.system(i0);
  if (attractors.size() != sys.size()) throw Error(ErrorKind::EmptyInput, "need one attractor per system");
  return delta_self_dissimilarity(sys, g, i0, attractors[static_cast<std::size_t>(i0 - 1)], exec);
}

struct BoundCheck {
  double measured = 0.0;  // d_H(blend, A_{i0})
  double bound = 0.0;     // beta_def_upper * delta + 2 * error_bound_worst
  bool slack_ok = false;
  double beta_upper = 0.0;
  double delta = 0.0;
  double error_bound_worst = 0.0;
};

/// Compares the measured distance from the blend to A_{i0} with the
/// coefficient bound, widened by the discretization error of both sets.
/// `attractor_i0` should be computed at least as deep as theta is long.
/// `delta` is delta_self_dissimilarity for i0; it does not depend on theta, so
/// sweeps over many sequences pass it in once.
inline BoundCheck bound_check(const BlendSystem& sys, const Grid& g, const BlendingSequence& theta, int i0,
                              const DiscreteSet& attractor_i0, double delta, ExecOptions exec = {}) {
  const auto blend = blend_approx(sys, g, theta, exec);
  BoundCheck out;
  out.delta = delta;
  out.beta_upper = beta_definition(theta, sys, i0).upper;
  out.error_bound_worst = blend.error_bound_worst;
  out.measured = hausdorff(blend.output, attractor_i0, exec).symmetric;
  out.bound = out.beta_upper * out.delta + 2.0 * out.error_bound_worst;
  out.slack_ok = out.measured <= out.bound;
  return out;
}

inline BoundCheck bound_check(const BlendSystem& sys, const Grid& g, const BlendingSequence& theta, int i0,
                              const DiscreteSet& attractor_i0, ExecOptions exec = {}) {
  return bound_check(sys, g, theta, i0, attractor_i0, delta_self_dissimilarity(sys, g, i0, attractor_i0, exec), exec);
}

inline BoundCheck bound_check(const BlendSystem& sys, const Grid& g, const BlendingSequence& theta, int i0,
                              ExecOptions exec = {}) {
  const auto attractor = blend_approx(sys, g, BlendingSequence::constant(i0, theta.size()), exec).output;
  return bound_check(sys, g, theta, i0, attractor, exec);
}

/// Largest pairwise Hausdorff distance between the attractors.
inline double attractor_spread(std::span<const DiscreteSet> attractors, ExecOptions exec = {}) {
  double m = 0.0;
  for (std::size_t a = 0; a < attractors.size(); ++a) {
    for (std::size_t b = a + 1; b < attractors.size(); ++b) {
      m = std::max(m, hausdorff(attractors[a], attractors[b], exec).symmetric);
    }
  }
  return m;
}

enum class RadiusVariant { theorem31, selfmax };

inline const char* to_string(RadiusVariant v) { return v == RadiusVariant::theorem31 ? "thm31" : "selfmax"; }

struct CoveringRadii {
  double m_value = 0.0;
  std::vector<double> radii;  // in system order
  RadiusVariant variant = RadiusVariant::selfmax;
};

/// Radii from solving r_i = lambda_i (M + max_j r_j) with the max over all j:
/// r~ = lambda_max M / (1 - lambda_max), r_i = lambda_i (M + r~).
inline CoveringRadii covering_radii_selfmax(std::span<const double> lambdas, double m_value) {
  detail::check_lambdas(lambdas);
  if (!(m_value >= 0.0)) throw Error(ErrorKind::LambdaOutOfRange, "M must be nonnegative");
  const double lam_max = *std::max_element(lambdas.begin(), lambdas.end());
  const double r_max = lam_max * m_value / (1.0 - lam_max);
  CoveringRadii out{m_value, {}, RadiusVariant::selfmax};
  for (double l : lambdas) out.radii.push_back(l * (m_value + r_max));
  return out;
}

/// Closed form for r_i = lambda_i (M + max_{j != i} r_j). With the lambdas
/// sorted ascending as i_1..i_N:
///   r_{i_j} = M lambda_{i_j} (1 + lambda_{i_N}) / (1 - lambda_{i_{N-1}} lambda_{i_N}),  j < N
///   r_{i_N} = M lambda_{i_N} (1 + lambda_{i_{N-1}}) / (1 - lambda_{i_{N-1}} lambda_{i_N})
inline CoveringRadii covering_radii_thm31(std::span<const double> lambdas, double m_value) {
  if (lambdas.size() < 2) throw Error(ErrorKind::NeedTwoSystems, "closed-form radii need at least two systems");
  detail::check_lambdas(lambdas);
  if (!(m_value >= 0.0)) throw Error(ErrorKind::LambdaOutOfRange, "M must be nonnegative");

  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lambdas[a] < lambdas[b]; });
  const double top = lambdas[order.back()];
  const double second = lambdas[order[order.size() - 2]];
  const double denom = 1.0 - second * top;

  CoveringRadii out{m_value, std::vector<double>(lambdas.size()), RadiusVariant::theorem31};
  for (std::size_t r = 0; r + 1 < order.size(); ++r) {
    out.radii[order[r]] = m_value * lambdas[order[r]] * (1.0 + top) / denom;
  }
  out.radii[order.back()] = m_value * top * (1.0 + second) / denom;
  return out;
}

}  // namespace blendifs
