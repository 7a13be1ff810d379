#pragma once

// Uniform epsilon-net over a rectangle, nearest-node projection, discrete
// sets of nodes and the discrete Hutchinson-Barnsley operator.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "blendifs/error.hpp"
#include "blendifs/ifs.hpp"

namespace blendifs {

struct CellIndex {
  int i = 0;  // column, x direction
  int j = 0;  // row, y direction

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// The (M+1) x (M+1) nodes (x0 + i*dx/M, y0 + j*dy/M), 0 <= i, j <= M.
class Grid {
 public:
  /// Sets on grids up to this resolution are stored as dense bit arrays.
  static constexpr int kDenseLimit = 4096;

  Grid(Box bbox, int resolution) : bbox_(bbox), m_(resolution) {
    if (resolution < 1) {
      throw Error(ErrorKind::BadLength, "grid resolution must be >= 1, got " + std::to_string(resolution));
    }
    if (!(bbox.width() > 0.0 && bbox.height() > 0.0)) {
      throw Error(ErrorKind::EmptyInput, "bounding box has zero area");
    }
    epsilon_ = bbox_.diameter() / (2.0 * m_);
  }

  const Box& bbox() const noexcept { return bbox_; }
  int resolution() const noexcept { return m_; }
  int side() const noexcept { return m_ + 1; }
  std::uint64_t node_count() const noexcept {
    return static_cast<std::uint64_t>(side()) * static_cast<std::uint64_t>(side());
  }
  /// Half the cell diagonal; every point of the box is this close to a node.
  double epsilon() const noexcept { return epsilon_; }
  double cell_diagonal() const noexcept { return 2.0 * epsilon_; }
  double step_x() const noexcept { return bbox_.width() / m_; }
  double step_y() const noexcept { return bbox_.height() / m_; }
  bool dense() const noexcept { return m_ <= kDenseLimit; }

  double node_x(int i) const noexcept { return i == m_ ? bbox_.x1 : bbox_.x0 + bbox_.width() * i / m_; }
  double node_y(int j) const noexcept { return j == m_ ? bbox_.y1 : bbox_.y0 + bbox_.height() * j / m_; }
  Point2 node(CellIndex c) const noexcept { return {node_x(c.i), node_y(c.j)}; }

  bool in_range(CellIndex c) const noexcept { return c.i >= 0 && c.i <= m_ && c.j >= 0 && c.j <= m_; }

  /// Row-major linear index; ascending order is the canonical cell order.
  std::uint64_t linear(CellIndex c) const noexcept {
    return static_cast<std::uint64_t>(c.j) * static_cast<std::uint64_t>(side()) + static_cast<std::uint64_t>(c.i);
  }
  CellIndex cell(std::uint64_t linear) const noexcept {
    const auto s = static_cast<std::uint64_t>(side());
    return {static_cast<int>(linear % s), static_cast<int>(linear / s)};
  }

  struct Projection {
    CellIndex cell;
    bool clamped;
  };

  /// Nearest node after clamping into the box; exact ties go toward +inf.
  Projection project_checked(Point2 p) const noexcept {
    bool clamped = false;
    const double x = clamp_coord(p.x, bbox_.x0, bbox_.x1, clamped);
    const double y = clamp_coord(p.y, bbox_.y0, bbox_.y1, clamped);
    return {{round_axis(x, bbox_.x0, bbox_.width()), round_axis(y, bbox_.y0, bbox_.height())}, clamped};
  }

  CellIndex project(Point2 p) const noexcept { return project_checked(p).cell; }

  friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.bbox_ == b.bbox_ && a.m_ == b.m_; }

 private:
  static double clamp_coord(double v, double lo, double hi, bool& clamped) noexcept {
    if (v < lo) {
      clamped = true;
      return lo;
    }
    if (v > hi) {
      clamped = true;
      return hi;
    }
    return v;
  }

  int round_axis(double v, double lo, double extent) const noexcept {
    const double u = (v - lo) / extent * m_;
    const auto k = static_cast<int>(std::floor(u + 0.5));
    return std::clamp(k, 0, m_);
  }

  Box bbox_;
  int m_;
  double epsilon_ = 0.0;
};

inline CellIndex project(const Grid& g, Point2 p) noexcept { return g.project(p); }

class DiscreteSet;

/// Collects cells in any order and produces a canonical DiscreteSet.
/// Several accumulators over the same grid merge by union, so the result does
/// not depend on how the work was split.
class CellAccumulator {
 public:
  explicit CellAccumulator(const Grid& grid) : grid_(grid) {
    if (grid_.dense()) bits_.assign((grid_.node_count() + 63) / 64, 0);
  }

  const Grid& grid() const noexcept { return grid_; }

  void insert(std::uint64_t linear) {
    if (grid_.dense()) {
      bits_[linear >> 6] |= std::uint64_t{1} << (linear & 63);
    } else {
      list_.push_back(linear);
    }
  }
  void insert(CellIndex c) { insert(grid_.linear(c)); }

  void merge(const CellAccumulator& other) {
    if (grid_.dense()) {
      for (std::size_t w = 0; w < bits_.size(); ++w) bits_[w] |= other.bits_[w];
    } else {
      list_.insert(list_.end(), other.list_.begin(), other.list_.end());
    }
  }

  DiscreteSet finish() &&;

 private:
  Grid grid_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> list_;
};

/// A set of grid nodes. Dense grids store one bit per node; larger grids
/// store the sorted list of linear indices. Either way, iteration visits
/// cells in row-major order (j, then i).
class DiscreteSet {
 public:
  explicit DiscreteSet(const Grid& grid) : grid_(grid) {
    if (grid_.dense()) bits_.assign((grid_.node_count() + 63) / 64, 0);
  }

  static DiscreteSet full(const Grid& grid) {
    DiscreteSet s(grid);
    if (grid.dense()) {
      const std::uint64_t n = grid.node_count();
      std::fill(s.bits_.begin(), s.bits_.end(), ~std::uint64_t{0});
      if (n % 64 != 0) s.bits_.back() = (std::uint64_t{1} << (n % 64)) - 1;
    } else {
      s.list_.resize(grid.node_count());
      for (std::uint64_t k = 0; k < s.list_.size(); ++k) s.list_[k] = k;
    }
    s.count_ = grid.node_count();
    return s;
  }

  static DiscreteSet from_cells(const Grid& grid, std::span<const CellIndex> cells) {
    CellAccumulator acc(grid);
    for (CellIndex c : cells) {
      if (!grid.in_range(c)) {
        throw Error(ErrorKind::GridMismatch,
                    "cell (" + std::to_string(c.i) + "," + std::to_string(c.j) + ") outside grid");
      }
      acc.insert(c);
    }
    return std::move(acc).finish();
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  bool contains(CellIndex c) const noexcept {
    if (!grid_.in_range(c)) return false;
    const std::uint64_t l = grid_.linear(c);
    if (grid_.dense()) return (bits_[l >> 6] >> (l & 63)) & 1U;
    return std::binary_search(list_.begin(), list_.end(), l);
  }

  /// Calls `fn(linear_index)` for every member in canonical order.
  template <class Fn>
  void for_each_linear(Fn&& fn) const {
    if (grid_.dense()) {
      for (std::size_t w = 0; w < bits_.size(); ++w) {
        std::uint64_t word = bits_[w];
        while (word != 0) {
          const int bit = std::countr_zero(word);
          fn(static_cast<std::uint64_t>(w) * 64 + static_cast<std::uint64_t>(bit));
          word &= word - 1;
        }
      }
    } else {
      for (std::uint64_t l : list_) fn(l);
    }
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for_each_linear([&](std::uint64_t l) { fn(grid_.cell(l)); });
  }

  std::vector<CellIndex> cells() const {
    std::vector<CellIndex> out;
    out.reserve(count_);
    for_each([&](CellIndex c) { out.push_back(c); });
    return out;
  }

  std::vector<std::uint64_t> linear_indices() const {
    std::vector<std::uint64_t> out;
    out.reserve(count_);
    for_each_linear([&](std::uint64_t l) { out.push_back(l); });
    return out;
  }

  bool is_subset_of(const DiscreteSet& other) const {
    if (!(grid_ == other.grid_)) return false;
    if (grid_.dense()) {
      for (std::size_t w = 0; w < bits_.size(); ++w) {
        if ((bits_[w] & ~other.bits_[w]) != 0) return false;
      }
      return true;
    }
    return std::includes(other.list_.begin(), other.list_.end(), list_.begin(), list_.end());
  }

  /// Raw storage access for algorithms that split work by word range.
  std::span<const std::uint64_t> dense_words() const noexcept { return bits_; }
  std::span<const std::uint64_t> sparse_indices() const noexcept { return list_; }

  friend bool operator==(const DiscreteSet& a, const DiscreteSet& b) {
    return a.grid_ == b.grid_ && a.count_ == b.count_ && a.bits_ == b.bits_ && a.list_ == b.list_;
  }

 private:
  friend class CellAccumulator;

  Grid grid_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> list_;
  std::size_t count_ = 0;
};

inline DiscreteSet CellAccumulator::finish() && {
  DiscreteSet s(grid_);
  if (grid_.dense()) {
    std::size_t n = 0;
    for (std::uint64_t w : bits_) n += static_cast<std::size_t>(std::popcount(w));
    s.bits_ = std::move(bits_);
    s.count_ = n;
  } else {
    std::sort(list_.begin(), list_.end());
    list_.erase(std::unique(list_.begin(), list_.end()), list_.end());
    s.count_ = list_.size();
    s.list_ = std::move(list_);
  }
  return s;
}

/// Node coordinates of every member, in canonical order.
inline std::vector<Point2> realize(const Grid& g, const DiscreteSet& s) {
  std::vector<Point2> out;
  out.reserve(s.size());
  s.for_each([&](CellIndex c) { out.push_back(g.node(c)); });
  return out;
}

inline std::vector<Point2> realize(const DiscreteSet& s) { return realize(s.grid(), s); }

inline DiscreteSet discretize(const Grid& g, std::span<const Point2> pts) {
  if (pts.empty()) throw Error(ErrorKind::EmptyInput, "discretize needs at least one point");
  CellAccumulator acc(g);
  for (Point2 p : pts) acc.insert(g.project(p));
  return std::move(acc).finish();
}

/// Moves a set onto grid `g`; identity when it already lives there.
inline DiscreteSet regrid(const Grid& g, const DiscreteSet& s) {
  if (s.grid() == g) return s;
  const auto pts = realize(s);
  return discretize(g, pts);
}

struct ExecOptions {
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;

  unsigned resolved() const noexcept {
    if (threads != 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
};

struct HutchinsonStep {
  DiscreteSet cells;
  /// Map images that fell outside the bounding box and were clamped.
  std::uint64_t clamped = 0;
};

namespace detail {

template <class Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    fn(0U, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = std::min(n, t * chunk);
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&fn, t, lo, hi] { fn(t, lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// r( union_j f_j(realize(s)) ) together with the number of clamped images.
inline HutchinsonStep apply_hutchinson(const Grid& g, const Ifs& ifs, const DiscreteSet& s, ExecOptions exec = {}) {
  if (s.empty()) throw Error(ErrorKind::EmptyInput, "Hutchinson operator needs a nonempty set");
  if (!(s.grid() == g)) throw Error(ErrorKind::GridMismatch, "set does not live on the working grid");

  std::vector<double> xs(static_cast<std::size_t>(g.side()));
  std::vector<double> ys(static_cast<std::size_t>(g.side()));
  for (int k = 0; k <= g.resolution(); ++k) {
    xs[static_cast<std::size_t>(k)] = g.node_x(k);
    ys[static_cast<std::size_t>(k)] = g.node_y(k);
  }
  const auto& maps = ifs.maps();
  const auto side = static_cast<std::uint64_t>(g.side());

  auto emit = [&](std::uint64_t l, CellAccumulator& acc, std::uint64_t& clamped) {
    const Point2 p{xs[l % side], ys[l / side]};
    for (const auto& m : maps) {
      const auto pr = g.project_checked(m(p));
      clamped += pr.clamped ? 1U : 0U;
      acc.insert(pr.cell);
    }
  };

  const unsigned threads = exec.resolved();
  const bool dense = g.dense();
  const auto words = s.dense_words();
  const auto list = s.sparse_indices();
  const std::size_t units = dense ? words.size() : list.size();
  const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(units, 1))));

  std::vector<CellAccumulator> accs(workers, CellAccumulator(g));
  std::vector<std::uint64_t> clamps(workers, 0);
  detail::parallel_chunks(units, workers, [&](unsigned t, std::size_t lo, std::size_t hi) {
    auto& acc = accs[t];
    auto& clamped = clamps[t];
    if (dense) {
      for (std::size_t w = lo; w < hi; ++w) {
        std::uint64_t word = words[w];
        while (word != 0) {
          emit(static_cast<std::uint64_t>(w) * 64 + static_cast<std::uint64_t>(std::countr_zero(word)), acc, clamped);
          word &= word - 1;
        }
      }
    } else {
      for (std::size_t k = lo; k < hi; ++k) emit(list[k], acc, clamped);
    }
  });

  for (unsigned t = 1; t < workers; ++t) accs[0].merge(accs[t]);
  std::uint64_t total = 0;
  for (auto c : clamps) total += c;
  return {std::move(accs[0]).finish(), total};
}

inline DiscreteSet hb_apply_discrete(const Grid& g, const Ifs& ifs, const DiscreteSet& s, ExecOptions exec = {}) {
  return apply_hutchinson(g, ifs, s, exec).cells;
}

/// Iterates the discrete operator until the set stops changing.
struct FixedSet {
  DiscreteSet cells;
  int iterations = 0;
  bool converged = false;
};

inline FixedSet iterate_to_fixed_set(const Grid& g, const Ifs& ifs, DiscreteSet start, int max_iterations,
                                     ExecOptions exec = {}) {
  FixedSet out{std::move(start), 0, false};
  while (out.iterations < max_iterations) {
    DiscreteSet next = hb_apply_discrete(g, ifs, out.cells, exec);
    ++out.iterations;
    if (next == out.cells) {
      out.converged = true;
      break;
    }
    out.cells = std::move(next);
  }
  return out;
}

// Cell-list text format: "M=<resolution>" header, then one "i,j" per line.

inline void write_cell_list(std::ostream& os, const DiscreteSet& s) {
  os << "M=" << s.grid().resolution() << '\n';
  s.for_each([&](CellIndex c) { os << c.i << ',' << c.j << '\n'; });
}

struct CellList {
  int resolution = 0;
  std::vector<CellIndex> cells;
};

inline CellList read_cell_list(std::istream& is) {
  CellList out;
  std::string line;
  if (!std::getline(is, line) || line.rfind("M=", 0) != 0) {
    throw Error(ErrorKind::ParseError, "cell list must start with 'M=<resolution>'");
  }
  try {
    std::size_t used = 0;
    out.resolution = std::stoi(line.substr(2), &used);
    if (used != line.size() - 2 || out.resolution < 1) throw std::invalid_argument("resolution");
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "bad cell list header '" + line + "'");
  }
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    CellIndex c;
    try {
      if (comma == std::string::npos) throw std::invalid_argument("comma");
      std::size_t u1 = 0, u2 = 0;
      c.i = std::stoi(line.substr(0, comma), &u1);
      c.j = std::stoi(line.substr(comma + 1), &u2);
      if (u1 != comma || u2 != line.size() - comma - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad cell on line " + std::to_string(lineno) + ": '" + line + "'");
    }
    if (c.i < 0 || c.j < 0 || c.i > out.resolution || c.j > out.resolution) {
      throw Error(ErrorKind::ParseError, "cell on line " + std::to_string(lineno) + " outside 0.." +
                                             std::to_string(out.resolution));
    }
    out.cells.push_back(c);
  }
  return out;
}

/// Builds a set on `g` from a cell list, re-projecting when the resolutions differ.
inline DiscreteSet to_discrete_set(const Grid& g, const CellList& list) {
  if (list.cells.empty()) throw Error(ErrorKind::EmptyInput, "cell list is empty");
  if (list.resolution == g.resolution()) return DiscreteSet::from_cells(g, list.cells);
  const Grid source(g.bbox(), list.resolution);
  return regrid(g, DiscreteSet::from_cells(source, list.cells));
}

}  // namespace blendifs
