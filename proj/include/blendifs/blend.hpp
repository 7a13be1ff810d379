#pragma once

// Discrete approximation of blends of IFS attractors with certified
// Hausdorff error bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "blendifs/error.hpp"
#include "blendifs/grid.hpp"
#include "blendifs/ifs.hpp"

namespace blendifs {

/// theta = (theta_1, ..., theta_k), 1-based system indices. theta_1 is the
/// outermost operator, so it is applied last.
class BlendingSequence {
 public:
  explicit BlendingSequence(std::vector<int> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw Error(ErrorKind::BadLength, "blending sequence must be nonempty");
    for (int s : symbols_) {
      if (s < 1) throw Error(ErrorKind::SymbolOutOfRange, "symbol " + std::to_string(s) + " < 1");
    }
  }

  static BlendingSequence constant(int symbol, std::size_t length) {
    return BlendingSequence(std::vector<int>(length, symbol));
  }

  const std::vector<int>& symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  int operator[](std::size_t k) const { return symbols_.at(k); }
  int max_symbol() const noexcept { return *std::max_element(symbols_.begin(), symbols_.end()); }

  void check_against(const BlendSystem& sys) const {
    for (int s : symbols_) {
      if (s > static_cast<int>(sys.size())) {
        throw Error(ErrorKind::SymbolOutOfRange,
                    "symbol " + std::to_string(s) + " not in 1.." + std::to_string(sys.size()));
      }
    }
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t k = 0; k < symbols_.size(); ++k) {
      if (k != 0) out += ',';
      out += std::to_string(symbols_[k]);
    }
    return out;
  }

  friend bool operator==(const BlendingSequence&, const BlendingSequence&) = default;

 private:
  std::vector<int> symbols_;
};

/// Parses "1,1,2,1" (whitespace around entries is ignored).
inline BlendingSequence parse_theta(std::string_view text) {
  std::vector<int> out;
  std::string item;
  std::istringstream is{std::string(text)};
  while (std::getline(is, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw Error(ErrorKind::ParseError, "empty entry in theta '" + std::string(text) + "'");
    item = item.substr(first, last - first + 1);
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad theta entry '" + item + "'");
    }
  }
  if (out.empty() || (!text.empty() && text.back() == ',')) {
    throw Error(ErrorKind::ParseError, "bad theta '" + std::string(text) + "'");
  }
  for (int s : out) {
    if (s < 1) throw Error(ErrorKind::SymbolOutOfRange, "theta symbol " + std::to_string(s) + " < 1");
  }
  return BlendingSequence(std::move(out));
}

struct ErrorBounds {
  double worst = 0.0;  // lambda^k diam + eps / (1 - lambda)
  double tight = 0.0;  // per-symbol products instead of the global lambda
};

/// Both certified Hausdorff bounds for k = |theta| operator applications.
///
/// tight = (prod_j lambda_{theta_j}) diam + eps * sum_{m=0..k} prod_{j<=m} lambda_{theta_j}:
/// the seed projection costs eps, and each application contracts the running
/// error before adding one more projection.
inline ErrorBounds error_bounds(const BlendSystem& sys, const BlendingSequence& theta, double epsilon, double diameter) {
  theta.check_against(sys);
  const double lam = sys.lambda_script_r();
  const auto k = static_cast<double>(theta.size());
  ErrorBounds b;
  b.worst = std::pow(lam, k) * diameter + epsilon / (1.0 - lam);

  double prefix = 1.0;
  double sum = 1.0;
  for (int s : theta.symbols()) {
    prefix *= sys.system(s).lambda_r();
    sum += prefix;
  }
  b.tight = prefix * diameter + epsilon * sum;
  return b;
}

struct BlendResult {
  DiscreteSet output;
  BlendingSequence theta;
  double error_bound_worst = 0.0;
  double error_bound_tight = 0.0;
  std::uint64_t clamp_count = 0;
};

/// BlendApprox: W = discretize(z), then W = r(F_{theta_j}(W)) for
/// j = k, k-1, ..., 1. Exactly k operator applications.
inline BlendResult blend_approx(const BlendSystem& sys, const Grid& g, const BlendingSequence& theta,
                                const DiscreteSet& z, ExecOptions exec = {}) {
  if (z.empty()) throw Error(ErrorKind::EmptyInput, "seed set Z is empty");
  theta.check_against(sys);

  DiscreteSet w = regrid(g, z);
  std::uint64_t clamped = 0;
  const auto& syms = theta.symbols();
  for (auto it = syms.rbegin(); it != syms.rend(); ++it) {
    auto step = apply_hutchinson(g, sys.system(*it), w, exec);
    clamped += step.clamped;
    w = std::move(step.cells);
  }
  const auto bounds = error_bounds(sys, theta, g.epsilon(), g.bbox().diameter());
  return {std::move(w), theta, bounds.worst, bounds.tight, clamped};
}

/// Full grid as the default seed set.
inline BlendResult blend_approx(const BlendSystem& sys, const Grid& g, const BlendingSequence& theta,
                                ExecOptions exec = {}) {
  return blend_approx(sys, g, theta, DiscreteSet::full(g), exec);
}

struct Parameters {
  int k = 1;
  double epsilon_max = 0.0;
  int m_min = 1;
};

/// Smallest k with lambda^k diam < delta/2, and the coarsest grid with
/// eps / (1 - lambda) <= delta/2.
inline Parameters choose_parameters(double delta, const BlendSystem& sys, const Box& bbox) {
  if (!(delta > 0.0)) throw Error(ErrorKind::DeltaNonPositive, "delta must be positive");
  const double lam = sys.lambda_script_r();
  const double diam = bbox.diameter();

  Parameters p;
  const double ratio = std::log(delta / (2.0 * diam)) / std::log(lam);
  p.k = ratio < 0.0 ? 1 : static_cast<int>(std::floor(ratio)) + 1;
  p.k = std::max(p.k, 1);
  // Round-off near integral ratios can leave k off by one either way.
  while (p.k > 1 && std::pow(lam, p.k - 1) * diam < delta / 2.0) --p.k;
  while (!(std::pow(lam, p.k) * diam < delta / 2.0)) ++p.k;

  p.epsilon_max = delta * (1.0 - lam) / 2.0;
  p.m_min = static_cast<int>(std::ceil(diam / (2.0 * p.epsilon_max)));
  p.m_min = std::max(p.m_min, 1);
  while (p.m_min > 1 && Grid(bbox, p.m_min - 1).epsilon() <= p.epsilon_max) --p.m_min;
  while (Grid(bbox, p.m_min).epsilon() > p.epsilon_max) ++p.m_min;
  return p;
}

/// SplitMix64 (Steele, Lea, Flood 2014), the generator commonly used to seed
/// xoshiro generators. Constants are part of the reproducibility contract.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n) by 128-bit multiply-shift.
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

inline BlendingSequence generate_theta(std::uint64_t seed, std::int64_t length, int n_systems) {
  if (length < 1) throw Error(ErrorKind::BadLength, "theta length must be >= 1");
  if (n_systems < 1) throw Error(ErrorKind::BadLength, "need at least one system");
  SplitMix64 rng(seed);
  std::vector<int> out(static_cast<std::size_t>(length));
  for (auto& s : out) s = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_systems)));
  return BlendingSequence(std::move(out));
}

}  // namespace blendifs
