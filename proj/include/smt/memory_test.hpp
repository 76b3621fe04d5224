#pragma once

// Ratio-of-block-maxima statistic and its level-beta decision.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "smt/fields.hpp"
#include "smt/lattice.hpp"
#include "smt/stable_core.hpp"

namespace smt {

/// floor(n^rho), snapping to the nearest integer when n^rho is within rounding
/// error of one (e.g. 4^0.5).
inline Coord small_half_width(Coord n, double rho) {
  const double x = std::pow(static_cast<double>(n), rho);
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) return static_cast<Coord>(nearest);
  return static_cast<Coord>(std::floor(x));
}

struct TestConfig {
  Alpha alpha;
  std::size_t dim = 2;
  Coord n = 1;
  double rho = 0.65;
  double beta = 0.1;

  /// Throws std::domain_error naming the offending parameter.
  void validate() const {
    if (dim < 1) throw std::domain_error("d must be at least 1");
    if (n < 1) throw std::domain_error("n must be at least 1");
    if (!(rho > 0.0 && rho < 1.0)) {
      throw std::domain_error("rho must lie in (0, 1), got " + std::to_string(rho));
    }
    if (!(beta > 0.0 && beta < 1.0)) {
      throw std::domain_error("beta must lie in (0, 1), got " + std::to_string(beta));
    }
    if (small_half_width(n, rho) < 1) {
      throw std::domain_error("floor(n^rho) must be at least 1");
    }
  }
};

struct TestResult {
  double u_n = 0.0;
  double v_n = 0.0;
  double t_n = 0.0;
  double tau_beta = 0.0;
  bool reject = false;
};

/// Box(n): the cube of half width n centered at the origin.
inline BoxSpec origin_box(Coord n, std::size_t dim) {
  if (n < 1) throw std::domain_error("n must be at least 1");
  return BoxSpec(LatticePoint::origin(dim), n);
}

/// (2n + m) e_1 + Box(m) with m = floor(n^rho).
inline BoxSpec shifted_box(Coord n, double rho, std::size_t dim) {
  if (n < 1) throw std::domain_error("n must be at least 1");
  const Coord m = small_half_width(n, rho);
  if (m < 1) throw std::domain_error("floor(n^rho) is zero; the shifted box is degenerate");
  LatticePoint center = LatticePoint::origin(dim);
  center[0] = 2 * n + m;
  return BoxSpec(std::move(center), m);
}

/// Evaluates U_n, V_n and T_n = U_n / V_n on one realization.
///
/// T_n is formed from the maxima with the realization's common multiplier
/// removed, ((2m+1)/(2n+1))^(d/alpha) * max_big / max_small, so any multiplier
/// shared by all values cancels exactly. U_n and V_n carry the multiplier.
inline TestResult compute_statistic(const FieldRealization& field, const TestConfig& cfg) {
  cfg.validate();
  if (!(field.spec().alpha() == cfg.alpha)) {
    throw std::invalid_argument("test alpha does not match the field's alpha");
  }
  if (field.spec().dim() != cfg.dim) {
    throw std::invalid_argument("test dimension does not match the field's dimension");
  }
  const double exponent = static_cast<double>(cfg.dim) / cfg.alpha.value();
  const BoxSpec big = origin_box(cfg.n, cfg.dim);
  const BoxSpec small = shifted_box(cfg.n, cfg.rho, cfg.dim);
  const double big_side = static_cast<double>(2 * big.half_width + 1);
  const double small_side = static_cast<double>(2 * small.half_width + 1);

  const double max_big = field.max_abs_normalized(big);
  const double max_small = field.max_abs_normalized(small);
  const double factor = field.common_factor();

  TestResult out;
  out.u_n = std::pow(big_side, -exponent) * (factor * max_big);
  out.v_n = std::pow(small_side, -exponent) * (factor * max_small);
  if (!(max_small > 0.0) || !(out.v_n > 0.0)) {
    throw std::runtime_error("shifted-box maximum V_n is zero; the statistic is undefined");
  }
  out.t_n = std::pow(small_side / big_side, exponent) * (max_big / max_small);
  out.tau_beta = critical_value(cfg.alpha, cfg.beta);
  out.reject = out.t_n < out.tau_beta;
  return out;
}

}  // namespace smt
