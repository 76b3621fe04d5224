#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace smt {

using Coord = std::int64_t;

/// Point of the integer lattice Z^d.
struct LatticePoint {
  std::vector<Coord> coords;

  LatticePoint() = default;
  explicit LatticePoint(std::vector<Coord> c) : coords(std::move(c)) {}
  LatticePoint(std::initializer_list<Coord> c) : coords(c) {}

  static LatticePoint origin(std::size_t dim) { return LatticePoint(std::vector<Coord>(dim, 0)); }

  std::size_t dim() const noexcept { return coords.size(); }
  Coord operator[](std::size_t i) const { return coords[i]; }
  Coord& operator[](std::size_t i) { return coords[i]; }

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

/// Axis-aligned rectangle of lattice points, both bounds inclusive.
class Region {
 public:
  Region(std::vector<Coord> lo, std::vector<Coord> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size() || lo_.empty()) {
      throw std::invalid_argument("region bounds must share a nonzero dimension");
    }
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (lo_[i] > hi_[i]) throw std::invalid_argument("region lower bound exceeds upper bound");
    }
  }

  std::size_t dim() const noexcept { return lo_.size(); }
  const std::vector<Coord>& lo() const noexcept { return lo_; }
  const std::vector<Coord>& hi() const noexcept { return hi_; }
  Coord extent(std::size_t i) const { return hi_[i] - lo_[i] + 1; }

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < dim(); ++i) n *= static_cast<std::size_t>(extent(i));
    return n;
  }

  bool contains(const LatticePoint& p) const {
    if (p.dim() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
    }
    return true;
  }

  bool contains(const Region& other) const {
    if (other.dim() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (other.lo_[i] < lo_[i] || other.hi_[i] > hi_[i]) return false;
    }
    return true;
  }

  bool intersects(const Region& other) const {
    if (other.dim() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (other.hi_[i] < lo_[i] || other.lo_[i] > hi_[i]) return false;
    }
    return true;
  }

  /// Row-major offset of `p`, last coordinate fastest. `p` must be contained.
  std::size_t linear_index(const LatticePoint& p) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
      index = index * static_cast<std::size_t>(extent(i)) + static_cast<std::size_t>(p[i] - lo_[i]);
    }
    return index;
  }

  /// Calls fn(point) for every point in row-major order.
  template <typename Fn>
  void for_each_point(Fn&& fn) const {
    LatticePoint p(lo_);
    for (;;) {
      fn(static_cast<const LatticePoint&>(p));
      std::size_t i = dim();
      while (i > 0) {
        --i;
        if (p[i] < hi_[i]) {
          ++p[i];
          break;
        }
        p[i] = lo_[i];
        if (i == 0) return;
      }
    }
  }

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<Coord> lo_;
  std::vector<Coord> hi_;
};

/// Centered hyper-cube {center + j : |j_i| <= half_width}, (2 half_width + 1)^d points.
struct BoxSpec {
  LatticePoint center;
  Coord half_width = 0;

  BoxSpec(LatticePoint c, Coord hw) : center(std::move(c)), half_width(hw) {
    if (hw < 0) throw std::invalid_argument("box half width must be nonnegative");
    if (center.dim() == 0) throw std::invalid_argument("box dimension must be at least 1");
  }

  std::size_t dim() const noexcept { return center.dim(); }

  Region region() const {
    std::vector<Coord> lo(center.coords), hi(center.coords);
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] -= half_width;
      hi[i] += half_width;
    }
    return Region(std::move(lo), std::move(hi));
  }

  std::size_t size() const { return region().size(); }
  bool contains(const LatticePoint& p) const { return region().contains(p); }

  friend bool operator==(const BoxSpec&, const BoxSpec&) = default;
};

}  // namespace smt
