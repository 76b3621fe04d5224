#pragma once

// Closed-form laws and random samplers for symmetric stable and extreme-value
// distributions.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace smt {

/// Stability index, restricted to the non-Gaussian range 0 < alpha < 2.
class Alpha {
 public:
  explicit Alpha(double value) : value_(value) {
    if (!(value > 0.0 && value < 2.0)) {
      throw std::domain_error("alpha must lie in (0, 2), got " + std::to_string(value));
    }
  }

  double value() const noexcept { return value_; }

  friend bool operator==(const Alpha&, const Alpha&) = default;

 private:
  double value_;
};

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of 64-bit words into one well-mixed word.
inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
  return splitmix64(h ^ splitmix64(v + 0x632be59bd9b4e019ULL));
}

}  // namespace detail

/// Reproducible random stream identified by (seed, stream_id).
///
/// The engine is a 64-bit Mersenne twister seeded through std::seed_seq from all
/// four 32-bit halves of the identifiers, so equal identifiers give identical
/// sequences and distinct identifiers give unrelated ones. Conversions to
/// doubles are done here rather than through <random> distributions so the
/// variates are identical across standard library implementations.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Independent child stream labelled by `tag`; does not advance this stream.
  RngStream fork(std::uint64_t tag) const {
    return RngStream(seed_, detail::hash_combine(stream_id_, tag));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

/// Tail constant of the symmetric stable law: P(|X| > x) ~ C_alpha x^-alpha for
/// unit scale. Equal to the reciprocal of the integral of x^-alpha sin x over (0, inf).
inline double c_alpha_constant(Alpha alpha) {
  const double a = alpha.value();
  if (a == 1.0) return 2.0 / std::numbers::pi;
  return (1.0 - a) / (std::tgamma(2.0 - a) * std::cos(std::numbers::pi * a / 2.0));
}

namespace detail {

// Chambers-Mallows-Stuck transform in Weron's parameterization for index != 1.
// `angle` is uniform on (-pi/2, pi/2), `w` is standard exponential. Returns a
// draw from S_a(1, skew, 0).
inline double cms_transform(double a, double skew, double angle, double w) {
  const double t = skew * std::tan(std::numbers::pi * a / 2.0);
  const double shift = std::atan(t) / a;
  const double spread = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
  const double shifted = a * (angle + shift);
  return spread * std::sin(shifted) / std::pow(std::cos(angle), 1.0 / a) *
         std::pow(std::cos(angle - shifted) / w, (1.0 - a) / a);
}

}  // namespace detail

/// Symmetric alpha-stable draw with characteristic function exp(-scale^a |t|^a).
inline double sample_sas(Alpha alpha, double scale, RngStream& rng) {
  if (!(scale > 0.0)) throw std::domain_error("stable scale must be positive");
  const double a = alpha.value();
  const double angle = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = -std::log(rng.uniform());
  double x;
  if (a == 1.0) {
    x = std::tan(angle);
  } else {
    x = std::sin(a * angle) / std::pow(std::cos(angle), 1.0 / a) *
        std::pow(std::cos((1.0 - a) * angle) / w, (1.0 - a) / a);
  }
  return scale * x;
}

/// One-sided stable draw A with Laplace transform E exp(-tA) = exp(-t^index),
/// 0 < index < 1.
inline double sample_positive_stable(double index, RngStream& rng) {
  if (!(index > 0.0 && index < 1.0)) {
    throw std::domain_error("positive stable index must lie in (0, 1)");
  }
  const double angle = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = -std::log(rng.uniform());
  // S_a(1, 1, 0) has Laplace transform exp(-t^a / cos(pi a / 2)).
  const double scale = std::pow(std::cos(std::numbers::pi * index / 2.0), 1.0 / index);
  return scale * detail::cms_transform(index, 1.0, angle, w);
}

/// Fills `out` with independent standard normals (Box-Muller, consumed in pairs).
inline void fill_standard_normal(RngStream& rng, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 1 < out.size(); i += 2) {
    const double radius = std::sqrt(-2.0 * std::log(rng.uniform()));
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    out[i] = radius * std::cos(theta);
    out[i + 1] = radius * std::sin(theta);
  }
  if (i < out.size()) {
    const double radius = std::sqrt(-2.0 * std::log(rng.uniform()));
    out[i] = radius * std::cos(2.0 * std::numbers::pi * rng.uniform());
  }
}

inline double sample_standard_normal(RngStream& rng) {
  double x;
  fill_standard_normal(rng, std::span<double>(&x, 1));
  return x;
}

/// c_alpha = sqrt(2) (E|G|^alpha)^(1/alpha) for a standard normal G, using
/// E|G|^alpha = 2^(alpha/2) Gamma((alpha+1)/2) / sqrt(pi).
inline double subgaussian_scale(Alpha alpha) {
  const double a = alpha.value();
  const double abs_moment =
      std::pow(2.0, a / 2.0) * std::tgamma((a + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
  return std::numbers::sqrt2 * std::pow(abs_moment, 1.0 / a);
}

/// Standard Frechet(alpha) distribution function.
inline double frechet_cdf(Alpha alpha, double z) {
  if (!(z > 0.0)) return 0.0;
  return std::exp(-std::pow(z, -alpha.value()));
}

/// Limit law of the scaled block maximum of a mixed moving average with
/// constant K.
class LimitLaw {
 public:
  LimitLaw(Alpha alpha, double k) : alpha_(alpha), k_(k) {
    if (!(k > 0.0)) throw std::domain_error("limit law constant K must be positive");
  }

  Alpha alpha() const noexcept { return alpha_; }
  double k() const noexcept { return k_; }

 private:
  Alpha alpha_;
  double k_;
};

inline double block_max_limit_cdf(const LimitLaw& law, double y) {
  if (!(y > 0.0)) return 0.0;
  const double a = law.alpha().value();
  return std::exp(-c_alpha_constant(law.alpha()) * std::pow(law.k(), a) * std::pow(y, -a));
}

/// Asymptotic null distribution of the ratio statistic, 1 / (1 + t^-alpha).
inline double null_cdf_T(Alpha alpha, double t) {
  if (!(t > 0.0)) return 0.0;
  return 1.0 / (1.0 + std::pow(t, -alpha.value()));
}

inline double null_pdf_T(Alpha alpha, double t) {
  if (!(t > 0.0)) throw std::domain_error("null density is defined for t > 0 only");
  const double a = alpha.value();
  const double tail = std::pow(t, -a);
  return a * tail / t / ((1.0 + tail) * (1.0 + tail));
}

/// Lower critical value tau with null_cdf_T(alpha, tau) = beta.
inline double critical_value(Alpha alpha, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::domain_error("beta must lie in (0, 1), got " + std::to_string(beta));
  }
  return std::pow(beta / (1.0 - beta), 1.0 / alpha.value());
}

}  // namespace smt
