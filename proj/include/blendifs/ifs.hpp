#pragma once

// Planar affine iterated function systems: maps, contractivity constants,
// code words and finite-depth code-map evaluation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blendifs/error.hpp"

namespace blendifs {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 p, Point2 q) { return std::hypot(p.x - q.x, p.y - q.y); }

/// (x, y) -> (a*x + b*y + e, c*x + d*y + f)
struct AffineMap2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double e = 0.0, f = 0.0;

  constexpr Point2 operator()(Point2 p) const noexcept {
    return {a * p.x + b * p.y + e, c * p.x + d * p.y + f};
  }

  friend bool operator==(const AffineMap2&, const AffineMap2&) = default;
};

constexpr Point2 affine_apply(const AffineMap2& m, Point2 p) noexcept { return m(p); }

/// Largest singular value of the linear part [[a, b], [c, d]].
///
/// Uses the decomposition of a 2x2 matrix into a scaled rotation plus a scaled
/// reflection: sigma_max = (|(a+d, c-b)| + |(a-d, c+b)|) / 2. Exact for pure
/// scalings and scaled rotations, where the eigenvalue route loses an ulp.
inline double lipschitz(const AffineMap2& m) noexcept {
  const double rot = std::hypot(m.a + m.d, m.c - m.b);
  const double refl = std::hypot(m.a - m.d, m.c + m.b);
  return 0.5 * (rot + refl);
}

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }
  double diameter() const noexcept { return std::hypot(width(), height()); }
  bool contains(Point2 p) const noexcept { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }

  std::array<Point2, 4> corners() const noexcept {
    return {Point2{x0, y0}, Point2{x1, y0}, Point2{x0, y1}, Point2{x1, y1}};
  }

  friend bool operator==(const Box&, const Box&) = default;
};

/// A validated contractive IFS. Only `ifs_validate` builds one, so
/// `lambda_r() < 1` always holds.
class Ifs {
 public:
  const std::string& name() const noexcept { return name_; }
  const std::vector<AffineMap2>& maps() const noexcept { return maps_; }
  const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  double lambda_r() const noexcept { return lambda_r_; }
  std::size_t size() const noexcept { return maps_.size(); }

 private:
  friend Ifs ifs_validate(std::vector<AffineMap2> maps, std::string name);

  std::string name_;
  std::vector<AffineMap2> maps_;
  std::vector<double> lambdas_;
  double lambda_r_ = 0.0;
};

inline Ifs ifs_validate(std::vector<AffineMap2> maps, std::string name = {}) {
  if (maps.empty()) {
    throw Error(ErrorKind::EmptyIfs, "IFS '" + name + "' has no maps");
  }
  Ifs ifs;
  ifs.lambdas_.reserve(maps.size());
  for (std::size_t j = 0; j < maps.size(); ++j) {
    const double lip = lipschitz(maps[j]);
    if (!(lip < 1.0)) {
      throw NotContractiveError(j, lip,
                                "IFS '" + name + "' map " + std::to_string(j + 1) +
                                    " has Lipschitz constant " + std::to_string(lip) + " >= 1");
    }
    ifs.lambdas_.push_back(lip);
  }
  ifs.lambda_r_ = *std::max_element(ifs.lambdas_.begin(), ifs.lambdas_.end());
  ifs.maps_ = std::move(maps);
  ifs.name_ = std::move(name);
  return ifs;
}

/// N contractive IFSs sharing one bounding box.
class BlendSystem {
 public:
  BlendSystem(Box bbox, std::vector<Ifs> systems) : bbox_(bbox), systems_(std::move(systems)) {
    if (systems_.empty()) {
      throw Error(ErrorKind::EmptyInput, "blend system needs at least one IFS");
    }
    for (const auto& s : systems_) {
      lambda_script_r_ = std::max(lambda_script_r_, s.lambda_r());
      for (std::size_t j = 0; j < s.size(); ++j) {
        // The image of a rectangle is the convex hull of its corner images.
        for (Point2 corner : bbox_.corners()) {
          if (!bbox_.contains(s.maps()[j](corner))) {
            warnings_.push_back("IFS '" + s.name() + "' map " + std::to_string(j + 1) +
                                " sends part of the bounding box outside it");
            break;
          }
        }
      }
    }
  }

  const Box& bbox() const noexcept { return bbox_; }
  const std::vector<Ifs>& systems() const noexcept { return systems_; }
  std::size_t size() const noexcept { return systems_.size(); }
  double lambda_script_r() const noexcept { return lambda_script_r_; }
  /// Bounding-box invariance violations. Not fatal: images are clamped later.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// 1-based lookup, matching blending-sequence symbols.
  const Ifs& system(int symbol) const {
    if (symbol < 1 || static_cast<std::size_t>(symbol) > systems_.size()) {
      throw Error(ErrorKind::SymbolOutOfRange,
                  "system index " + std::to_string(symbol) + " not in 1.." + std::to_string(systems_.size()));
    }
    return systems_[static_cast<std::size_t>(symbol - 1)];
  }

  /// 1-based index of the IFS called `name`, or 0.
  int index_of(const std::string& name) const noexcept {
    for (std::size_t i = 0; i < systems_.size(); ++i) {
      if (systems_[i].name() == name) return static_cast<int>(i + 1);
    }
    return 0;
  }

 private:
  Box bbox_;
  std::vector<Ifs> systems_;
  double lambda_script_r_ = 0.0;
  std::vector<std::string> warnings_;
};

/// Finite word over {1..alphabet}.
class CodeWord {
 public:
  CodeWord(std::vector<int> symbols, int alphabet) : symbols_(std::move(symbols)), alphabet_(alphabet) {
    for (int s : symbols_) {
      if (s < 1 || s > alphabet_) {
        throw Error(ErrorKind::SymbolOutOfRange,
                    "symbol " + std::to_string(s) + " not in 1.." + std::to_string(alphabet_));
      }
    }
  }

  std::span<const int> symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  int alphabet() const noexcept { return alphabet_; }

  friend bool operator==(const CodeWord&, const CodeWord&) = default;

 private:
  std::vector<int> symbols_;
  int alphabet_;
};

/// f_{w1}(f_{w2}(...f_{wk}(x0))): the last symbol is applied first.
inline Point2 code_map_point(const Ifs& ifs, std::span<const int> word, Point2 x0) {
  const int n = static_cast<int>(ifs.size());
  Point2 p = x0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (*it < 1 || *it > n) {
      throw Error(ErrorKind::SymbolOutOfRange,
                  "symbol " + std::to_string(*it) + " not in 1.." + std::to_string(n));
    }
    p = ifs.maps()[static_cast<std::size_t>(*it - 1)](p);
  }
  return p;
}

inline Point2 code_map_point(const Ifs& ifs, const CodeWord& word, Point2 x0) {
  return code_map_point(ifs, word.symbols(), x0);
}

/// lambda^k where k is the first (1-based) position at which the words differ.
inline double d_lambda(std::span<const int> a, std::span<const int> b, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorKind::LambdaOutOfRange, "lambda must lie in (0, 1), got " + std::to_string(lambda));
  }
  if (a.size() != b.size()) {
    throw Error(ErrorKind::BadLength, "code words must have equal length");
  }
  const auto diff = std::mismatch(a.begin(), a.end(), b.begin());
  if (diff.first == a.end()) return 0.0;
  const auto k = static_cast<int>(diff.first - a.begin()) + 1;
  return std::pow(lambda, k);
}

inline double d_lambda(const CodeWord& a, const CodeWord& b, double lambda) {
  return d_lambda(a.symbols(), b.symbols(), lambda);
}

}  // namespace blendifs
