#pragma once

// Hausdorff distances between finite point sets. `hausdorff_brute` is the
// O(|A||B|) reference; `hausdorff` uses an exact Euclidean distance transform
// of the grid and costs O(M^2) regardless of set sizes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "blendifs/error.hpp"
#include "blendifs/grid.hpp"
#include "blendifs/ifs.hpp"

namespace blendifs {

struct HausdorffResult {
  double directed_ab = 0.0;  // max_{a in A} min_{b in B} |a - b|
  double directed_ba = 0.0;
  double symmetric = 0.0;
};

inline HausdorffResult hausdorff_brute(std::span<const Point2> a, std::span<const Point2> b, ExecOptions exec = {}) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyInput, "Hausdorff distance needs nonempty sets");

  auto directed = [&](std::span<const Point2> from, std::span<const Point2> to) {
    std::vector<double> partial(exec.resolved(), 0.0);
    detail::parallel_chunks(from.size(), static_cast<unsigned>(partial.size()),
                            [&](unsigned t, std::size_t lo, std::size_t hi) {
                              double worst = 0.0;
                              for (std::size_t k = lo; k < hi; ++k) {
                                double best = std::numeric_limits<double>::infinity();
                                for (const Point2& q : to) {
                                  const double dx = from[k].x - q.x;
                                  const double dy = from[k].y - q.y;
                                  best = std::min(best, dx * dx + dy * dy);
                                }
                                worst = std::max(worst, best);
                              }
                              partial[t] = worst;
                            });
    return std::sqrt(*std::max_element(partial.begin(), partial.end()));
  };

  HausdorffResult r;
  r.directed_ab = directed(a, b);
  r.directed_ba = directed(b, a);
  r.symmetric = std::max(r.directed_ab, r.directed_ba);
  return r;
}

inline HausdorffResult hausdorff_brute(const DiscreteSet& a, const DiscreteSet& b, ExecOptions exec = {}) {
  const auto pa = realize(a);
  const auto pb = realize(b);
  return hausdorff_brute(pa, pb, exec);
}

/// Squared Euclidean distance from every grid node to the nearest member of
/// a target set (Felzenszwalb-Huttenlocher lower envelope of parabolas, one
/// axis at a time).
class DistanceField {
 public:
  DistanceField(const DiscreteSet& target, ExecOptions exec = {}) : grid_(target.grid()) {
    if (target.empty()) throw Error(ErrorKind::EmptyInput, "distance field of an empty set");
    const int side = grid_.side();
    const auto n = static_cast<std::size_t>(side);
    const double hx = grid_.step_x();
    const double hy = grid_.step_y();
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<char> member(n * n, 0);
    target.for_each_linear([&](std::uint64_t l) { member[l] = 1; });

    // Rows: distance along x to the nearest member in the same row.
    sq_.assign(n * n, inf);
    detail::parallel_chunks(n, exec.resolved(), [&](unsigned, std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j) {
        double* row = &sq_[j * n];
        const char* mrow = &member[j * n];
        long last = -1;
        for (std::size_t i = 0; i < n; ++i) {
          if (mrow[i]) last = static_cast<long>(i);
          if (last >= 0) row[i] = static_cast<double>(static_cast<long>(i) - last);
        }
        last = -1;
        for (std::size_t i = n; i-- > 0;) {
          if (mrow[i]) last = static_cast<long>(i);
          if (last >= 0) row[i] = std::min(row[i], static_cast<double>(last - static_cast<long>(i)));
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (row[i] != inf) row[i] = (row[i] * hx) * (row[i] * hx);
        }
      }
    });

    // Columns: lower envelope of y-parabolas rooted at the row results.
    detail::parallel_chunks(n, exec.resolved(), [&](unsigned, std::size_t lo, std::size_t hi) {
      std::vector<double> f(n), out(n), z(n + 1);
      std::vector<std::size_t> v(n);
      for (std::size_t i = lo; i < hi; ++i) {
        for (std::size_t j = 0; j < n; ++j) f[j] = sq_[j * n + i];
        envelope(f, out, v, z, hy);
        for (std::size_t j = 0; j < n; ++j) sq_[j * n + i] = out[j];
      }
    });
  }

  const Grid& grid() const noexcept { return grid_; }

  double squared_at(std::uint64_t linear) const noexcept { return sq_[linear]; }
  double at(CellIndex c) const noexcept { return std::sqrt(sq_[grid_.linear(c)]); }

  /// Directed distance from `s` to the target.
  double max_over(const DiscreteSet& s) const {
    if (!(s.grid() == grid_)) throw Error(ErrorKind::GridMismatch, "set and distance field use different grids");
    double worst = 0.0;
    s.for_each_linear([&](std::uint64_t l) { worst = std::max(worst, sq_[l]); });
    return std::sqrt(worst);
  }

 private:
  // out[q] = min_p f[p] + (h (q - p))^2, skipping infinite samples.
  static void envelope(const std::vector<double>& f, std::vector<double>& out, std::vector<std::size_t>& v,
                       std::vector<double>& z, double h) {
    const std::size_t n = f.size();
    const double inf = std::numeric_limits<double>::infinity();
    const double h2 = h * h;
    std::size_t k = 0;
    bool any = false;
    for (std::size_t q = 0; q < n; ++q) {
      if (f[q] == inf) continue;
      if (!any) {
        v[0] = q;
        z[0] = -inf;
        z[1] = inf;
        any = true;
        continue;
      }
      auto cross = [&](std::size_t p) {
        const auto qd = static_cast<double>(q);
        const auto pd = static_cast<double>(p);
        return ((f[q] + h2 * qd * qd) - (f[p] + h2 * pd * pd)) / (2.0 * h2 * (qd - pd));
      };
      double s = cross(v[k]);
      // z[0] is -inf, so this stops at k == 0.
      while (s <= z[k]) s = cross(v[--k]);
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = inf;
    }
    if (!any) {
      std::fill(out.begin(), out.end(), inf);
      return;
    }
    k = 0;
    for (std::size_t q = 0; q < n; ++q) {
      while (z[k + 1] < static_cast<double>(q)) ++k;
      const double d = h * (static_cast<double>(q) - static_cast<double>(v[k]));
      out[q] = d * d + f[v[k]];
    }
  }

  Grid grid_;
  std::vector<double> sq_;
};

/// Grid-accelerated Hausdorff distance between two sets on the same grid.
inline HausdorffResult hausdorff(const DiscreteSet& a, const DiscreteSet& b, ExecOptions exec = {}) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyInput, "Hausdorff distance needs nonempty sets");
  if (!(a.grid() == b.grid())) throw Error(ErrorKind::GridMismatch, "sets live on different grids");
  HausdorffResult r;
  r.directed_ab = DistanceField(b, exec).max_over(a);
  r.directed_ba = DistanceField(a, exec).max_over(b);
  r.symmetric = std::max(r.directed_ab, r.directed_ba);
  return r;
}

}  // namespace blendifs
