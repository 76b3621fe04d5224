#pragma once

// Per-replication realizations of stationary SaS random fields on Z^d.
//
// A realization draws every latent variable it needs for a declared list of
// support boxes up front, then answers point and box-maximum queries without
// further randomness. Values are stored as a shared multiplier times a
// normalized latent quantity so that ratio statistics can cancel the
// multiplier exactly.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smt/lattice.hpp"
#include "smt/stable_core.hpp"

namespace smt {

enum class FieldKind {
  IidSas,           // independent SaS(1) values
  SubGaussian,      // c_alpha A^(1/2) G_j
  FiniteKernelMA,   // sum_k coeff_k Z_(t - offset_k)
  EffectiveDimIid,  // Y(t1 - t2), Y i.i.d. SaS(1), d = 3
  EffectiveDimMA1,  // Y(c) = Z(c) + Z(c - 1), c = t1 - t2, d = 3
};

inline bool is_effective_dim(FieldKind kind) {
  return kind == FieldKind::EffectiveDimIid || kind == FieldKind::EffectiveDimMA1;
}

struct KernelTerm {
  LatticePoint offset;
  double coeff = 0.0;

  friend bool operator==(const KernelTerm&, const KernelTerm&) = default;
};

class FieldSpec {
 public:
  FieldSpec(FieldKind kind, Alpha alpha, std::size_t dim, std::vector<KernelTerm> kernel = {})
      : kind_(kind), alpha_(alpha), dim_(dim), kernel_(std::move(kernel)) {
    if (dim_ < 1) throw std::invalid_argument("field dimension must be at least 1");
    if (is_effective_dim(kind_) && dim_ != 3) {
      throw std::invalid_argument("effective-dimension fields are defined for d = 3 only");
    }
    if (kind_ == FieldKind::FiniteKernelMA) {
      if (kernel_.empty()) throw std::invalid_argument("moving-average kernel is empty");
      bool nonzero = false;
      for (const auto& term : kernel_) {
        if (term.offset.dim() != dim_) {
          throw std::invalid_argument("kernel offset dimension does not match field dimension");
        }
        if (!std::isfinite(term.coeff)) throw std::invalid_argument("kernel coefficient is not finite");
        nonzero = nonzero || term.coeff != 0.0;
      }
      if (!nonzero) throw std::invalid_argument("moving-average kernel has no nonzero coefficient");
    } else if (!kernel_.empty()) {
      throw std::invalid_argument("only moving-average fields take a kernel");
    }
  }

  static FieldSpec iid(Alpha alpha, std::size_t dim) { return {FieldKind::IidSas, alpha, dim}; }
  static FieldSpec subgaussian(Alpha alpha, std::size_t dim) {
    return {FieldKind::SubGaussian, alpha, dim};
  }
  static FieldSpec moving_average(Alpha alpha, std::vector<KernelTerm> kernel) {
    const std::size_t dim = kernel.empty() ? 1 : kernel.front().offset.dim();
    return {FieldKind::FiniteKernelMA, alpha, dim, std::move(kernel)};
  }
  static FieldSpec effective_dim_iid(Alpha alpha) { return {FieldKind::EffectiveDimIid, alpha, 3}; }
  static FieldSpec effective_dim_ma1(Alpha alpha) { return {FieldKind::EffectiveDimMA1, alpha, 3}; }

  FieldKind kind() const noexcept { return kind_; }
  Alpha alpha() const noexcept { return alpha_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<KernelTerm>& kernel() const noexcept { return kernel_; }

  FieldSpec with_alpha(Alpha alpha) const {
    FieldSpec copy = *this;
    copy.alpha_ = alpha;
    return copy;
  }

  /// Canonical text form in the field-spec grammar (alpha and d are not part of it).
  std::string to_string() const {
    switch (kind_) {
      case FieldKind::IidSas: return "iid";
      case FieldKind::SubGaussian: return "subgaussian";
      case FieldKind::EffectiveDimIid: return "effdim-iid";
      case FieldKind::EffectiveDimMA1: return "effdim-ma1";
      case FieldKind::FiniteKernelMA: break;
    }
    std::string out = "ma:";
    for (std::size_t k = 0; k < kernel_.size(); ++k) {
      if (k > 0) out += ',';
      out += '[';
      for (std::size_t i = 0; i < dim_; ++i) {
        if (i > 0) out += ';';
        out += std::to_string(kernel_[k].offset[i]);
      }
      out += "]=";
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, kernel_[k].coeff);
      out.append(buf, res.ptr);
    }
    return out;
  }

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

 private:
  FieldKind kind_;
  Alpha alpha_;
  std::size_t dim_;
  std::vector<KernelTerm> kernel_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline KernelTerm parse_kernel_term(std::string_view term) {
  term = trim(term);
  const auto close = term.find(']');
  if (term.empty() || term.front() != '[' || close == std::string_view::npos) {
    throw std::invalid_argument("kernel term must look like [o1;...;od]=coeff: '" +
                                std::string(term) + "'");
  }
  KernelTerm out;
  std::string_view inside = term.substr(1, close - 1);
  while (!inside.empty()) {
    const auto sep = inside.find_first_of(";, \t");
    const auto token = trim(inside.substr(0, sep));
    if (!token.empty()) {
      Coord value = 0;
      auto res = std::from_chars(token.data(), token.data() + token.size(), value);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw std::invalid_argument("bad kernel offset component '" + std::string(token) + "'");
      }
      out.offset.coords.push_back(value);
    }
    if (sep == std::string_view::npos) break;
    inside.remove_prefix(sep + 1);
  }
  if (out.offset.dim() == 0) throw std::invalid_argument("kernel offset is empty");
  auto rest = trim(term.substr(close + 1));
  if (rest.empty() || rest.front() != '=') {
    throw std::invalid_argument("kernel term is missing '=coeff': '" + std::string(term) + "'");
  }
  rest = trim(rest.substr(1));
  auto res = std::from_chars(rest.data(), rest.data() + rest.size(), out.coeff);
  if (rest.empty() || res.ec != std::errc() || res.ptr != rest.data() + rest.size()) {
    throw std::invalid_argument("bad kernel coefficient '" + std::string(rest) + "'");
  }
  return out;
}

}  // namespace detail

/// Parses `iid`, `subgaussian`, `effdim-iid`, `effdim-ma1` or
/// `ma:[o1;...;od]=c,[...]=c,...`. When `dim` is not given it defaults to 3
/// for effective-dimension fields, the offset dimension for kernels and 2
/// otherwise.
inline FieldSpec parse_field_spec(std::string_view text, Alpha alpha,
                                  std::optional<std::size_t> dim = std::nullopt) {
  text = detail::trim(text);
  if (text == "iid") return FieldSpec::iid(alpha, dim.value_or(2));
  if (text == "subgaussian") return FieldSpec::subgaussian(alpha, dim.value_or(2));
  if (text == "effdim-iid") return {FieldKind::EffectiveDimIid, alpha, dim.value_or(3)};
  if (text == "effdim-ma1") return {FieldKind::EffectiveDimMA1, alpha, dim.value_or(3)};
  if (text.starts_with("ma:")) {
    std::vector<KernelTerm> kernel;
    std::string_view body = text.substr(3);
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= body.size(); ++i) {
      if (i == body.size() || (body[i] == ',' && depth == 0)) {
        kernel.push_back(detail::parse_kernel_term(body.substr(start, i - start)));
        start = i + 1;
      } else if (body[i] == '[') {
        ++depth;
      } else if (body[i] == ']') {
        --depth;
      }
    }
    const std::size_t kernel_dim = kernel.front().offset.dim();
    for (const auto& term : kernel) {
      if (term.offset.dim() != kernel_dim) {
        throw std::invalid_argument("kernel offsets have inconsistent dimensions");
      }
    }
    return {FieldKind::FiniteKernelMA, alpha, dim.value_or(kernel_dim), std::move(kernel)};
  }
  throw std::invalid_argument("unknown field spec '" + std::string(text) + "'");
}

/// Dense block of latent values over a region, row-major.
struct LatentPatch {
  Region region;
  std::vector<double> values;
};

/// Latent one-dimensional sequence indexed by c in [lo, lo + values.size()).
struct LinePath {
  Coord lo = 0;
  std::vector<double> values;

  Coord hi() const { return lo + static_cast<Coord>(values.size()) - 1; }
  double at(Coord c) const { return values[static_cast<std::size_t>(c - lo)]; }
};

class FieldRealization;
FieldRealization realize(const FieldSpec& spec, const RngStream& rng, std::vector<BoxSpec> support);

class FieldRealization {
 public:
  const FieldSpec& spec() const noexcept { return spec_; }
  const std::vector<BoxSpec>& support() const noexcept { return support_; }

  /// Multiplier shared by every value: c_alpha A^(1/2) for sub-Gaussian fields,
  /// times any scale applied through scaled(); 1 otherwise.
  double common_factor() const noexcept { return output_scale_ * shared_multiplier(); }

  /// The realized positive stable variable A (sub-Gaussian fields), else 1.
  double mixing_variable() const noexcept { return mixing_; }

  const std::vector<LatentPatch>& latent_patches() const noexcept { return patches_; }
  const LinePath& effective_path() const noexcept { return path_; }
  const LinePath& effective_innovations() const noexcept { return innovations_; }

  double value_at(const LatticePoint& p) const {
    return common_factor() * normalized_value_at(p);
  }

  double max_abs_over_box(const BoxSpec& box) const {
    return common_factor() * max_abs_normalized(box);
  }

  /// Value divided by common_factor().
  double normalized_value_at(const LatticePoint& p) const {
    const std::size_t b = support_index_of(p);
    if (is_effective_dim(spec_.kind())) return path_.at(p[0] - p[1]);
    return lattice_value(patches_[patch_of_box_[b]], p);
  }

  /// Maximum of |value| / common_factor() over the box. Effective-dimension
  /// fields scan only the range of t1 - t2 covered by the box.
  double max_abs_normalized(const BoxSpec& box) const {
    const std::size_t b = support_index_of(box);
    if (is_effective_dim(spec_.kind())) {
      const Coord c = box.center[0] - box.center[1];
      double best = 0.0;
      for (Coord k = c - 2 * box.half_width; k <= c + 2 * box.half_width; ++k) {
        best = std::max(best, std::abs(path_.at(k)));
      }
      return best;
    }
    const LatentPatch& patch = patches_[patch_of_box_[b]];
    double best = 0.0;
    box.region().for_each_point(
        [&](const LatticePoint& p) { best = std::max(best, std::abs(lattice_value(patch, p))); });
    return best;
  }

  /// Same sample path multiplied by c > 0.
  FieldRealization scaled(double c) const {
    if (!(c > 0.0)) throw std::domain_error("field scale factor must be positive");
    FieldRealization copy = *this;
    copy.output_scale_ *= c;
    return copy;
  }

  /// Same Gaussian values with the mixing variable A replaced (sub-Gaussian only).
  FieldRealization with_mixing_variable(double a) const {
    if (spec_.kind() != FieldKind::SubGaussian) {
      throw std::logic_error("only sub-Gaussian fields have a mixing variable");
    }
    if (!(a > 0.0)) throw std::domain_error("mixing variable must be positive");
    FieldRealization copy = *this;
    copy.mixing_ = a;
    return copy;
  }

  /// Realization over explicitly given latent values (field values for i.i.d.
  /// fields, Gaussians for sub-Gaussian fields, innovations for kernel fields).
  /// Every support box's latent requirement must fit inside one patch.
  static FieldRealization from_latent(const FieldSpec& spec, std::vector<BoxSpec> support,
                                      std::vector<LatentPatch> patches, double mixing = 1.0) {
    if (is_effective_dim(spec.kind())) {
      throw std::logic_error("effective-dimension fields are built from a line path");
    }
    FieldRealization r(spec, std::move(support));
    r.mixing_ = mixing;
    for (const auto& patch : patches) {
      if (patch.values.size() != patch.region.size()) {
        throw std::invalid_argument("latent patch size does not match its region");
      }
    }
    r.patches_ = std::move(patches);
    for (const auto& box : r.support_) {
      const Region need = r.latent_region(box);
      std::size_t k = 0;
      while (k < r.patches_.size() && !r.patches_[k].region.contains(need)) ++k;
      if (k == r.patches_.size()) {
        throw std::invalid_argument("latent patches do not cover a support box");
      }
      r.patch_of_box_.push_back(k);
    }
    return r;
  }

 private:
  friend FieldRealization realize(const FieldSpec&, const RngStream&, std::vector<BoxSpec>);

  FieldRealization(FieldSpec spec, std::vector<BoxSpec> support)
      : spec_(std::move(spec)), support_(std::move(support)) {
    if (support_.empty()) throw std::invalid_argument("realization support is empty");
    for (const auto& box : support_) {
      if (box.dim() != spec_.dim()) {
        throw std::invalid_argument("support box dimension does not match the field dimension");
      }
    }
  }

  double shared_multiplier() const {
    if (spec_.kind() != FieldKind::SubGaussian) return 1.0;
    return subgaussian_scale(spec_.alpha()) * std::sqrt(mixing_);
  }

  // Latent values needed to evaluate the field on `box`.
  Region latent_region(const BoxSpec& box) const {
    Region region = box.region();
    if (spec_.kind() != FieldKind::FiniteKernelMA) return region;
    std::vector<Coord> lo = region.lo(), hi = region.hi();
    for (std::size_t i = 0; i < spec_.dim(); ++i) {
      Coord min_off = spec_.kernel().front().offset[i], max_off = min_off;
      for (const auto& term : spec_.kernel()) {
        min_off = std::min(min_off, term.offset[i]);
        max_off = std::max(max_off, term.offset[i]);
      }
      lo[i] -= max_off;
      hi[i] -= min_off;
    }
    return Region(std::move(lo), std::move(hi));
  }

  double lattice_value(const LatentPatch& patch, const LatticePoint& p) const {
    if (spec_.kind() != FieldKind::FiniteKernelMA) {
      return patch.values[patch.region.linear_index(p)];
    }
    double sum = 0.0;
    LatticePoint q = p;
    for (const auto& term : spec_.kernel()) {
      for (std::size_t i = 0; i < q.dim(); ++i) q[i] = p[i] - term.offset[i];
      sum += term.coeff * patch.values[patch.region.linear_index(q)];
    }
    return sum;
  }

  std::size_t support_index_of(const LatticePoint& p) const {
    for (std::size_t b = 0; b < support_.size(); ++b) {
      if (support_[b].contains(p)) return b;
    }
    throw std::out_of_range("lattice point lies outside the realized support");
  }

  std::size_t support_index_of(const BoxSpec& box) const {
    const Region region = box.region();
    for (std::size_t b = 0; b < support_.size(); ++b) {
      if (support_[b].region().contains(region)) return b;
    }
    throw std::out_of_range("box lies outside the realized support");
  }

  FieldSpec spec_;
  std::vector<BoxSpec> support_;
  double output_scale_ = 1.0;
  double mixing_ = 1.0;
  std::vector<LatentPatch> patches_;
  std::vector<std::size_t> patch_of_box_;
  LinePath path_;
  LinePath innovations_;
};

namespace detail {

inline constexpr std::uint64_t kMixingTag = 1;
inline constexpr std::uint64_t kLatentTag = 2;

// Draws `count` latent values for the field kind.
inline void draw_latent(const FieldSpec& spec, RngStream& rng, std::span<double> out) {
  if (spec.kind() == FieldKind::SubGaussian) {
    fill_standard_normal(rng, out);
  } else {
    for (auto& v : out) v = sample_sas(spec.alpha(), 1.0, rng);
  }
}

}  // namespace detail

/// Draws and freezes all latent randomness needed on the union of `support`.
inline FieldRealization realize(const FieldSpec& spec, const RngStream& rng,
                                std::vector<BoxSpec> support) {
  FieldRealization r(spec, std::move(support));
  RngStream latent = rng.fork(detail::kLatentTag);

  if (is_effective_dim(spec.kind())) {
    Coord lo = 0, hi = 0;
    for (std::size_t b = 0; b < r.support_.size(); ++b) {
      const auto& box = r.support_[b];
      const Coord c = box.center[0] - box.center[1];
      const Coord box_lo = c - 2 * box.half_width, box_hi = c + 2 * box.half_width;
      lo = b == 0 ? box_lo : std::min(lo, box_lo);
      hi = b == 0 ? box_hi : std::max(hi, box_hi);
    }
    const Coord lag = spec.kind() == FieldKind::EffectiveDimMA1 ? 1 : 0;
    r.innovations_.lo = lo - lag;
    r.innovations_.values.resize(static_cast<std::size_t>(hi - lo + 1 + lag));
    detail::draw_latent(spec, latent, r.innovations_.values);
    if (lag == 0) {
      r.path_ = r.innovations_;
    } else {
      r.path_.lo = lo;
      r.path_.values.resize(static_cast<std::size_t>(hi - lo + 1));
      for (Coord c = lo; c <= hi; ++c) {
        r.path_.values[static_cast<std::size_t>(c - lo)] =
            r.innovations_.at(c) + r.innovations_.at(c - 1);
      }
    }
    return r;
  }

  if (spec.kind() == FieldKind::SubGaussian) {
    RngStream mixing = rng.fork(detail::kMixingTag);
    r.mixing_ = sample_positive_stable(spec.alpha().value() / 2.0, mixing);
  }

  // One patch per support box; points already drawn for an earlier patch are
  // copied so overlapping boxes see one sample path.
  for (const auto& box : r.support_) {
    LatentPatch patch{r.latent_region(box), {}};
    patch.values.assign(patch.region.size(), 0.0);
    std::vector<const LatentPatch*> earlier;
    for (const auto& prev : r.patches_) {
      if (prev.region.intersects(patch.region)) earlier.push_back(&prev);
    }
    if (earlier.empty()) {
      detail::draw_latent(spec, latent, patch.values);
    } else {
      std::vector<std::size_t> fresh;
      std::size_t index = 0;
      patch.region.for_each_point([&](const LatticePoint& p) {
        const LatentPatch* source = nullptr;
        for (const auto* prev : earlier) {
          if (prev->region.contains(p)) {
            source = prev;
            break;
          }
        }
        if (source) {
          patch.values[index] = source->values[source->region.linear_index(p)];
        } else {
          fresh.push_back(index);
        }
        ++index;
      });
      std::vector<double> draws(fresh.size());
      detail::draw_latent(spec, latent, draws);
      for (std::size_t k = 0; k < fresh.size(); ++k) patch.values[fresh[k]] = draws[k];
    }
    r.patch_of_box_.push_back(r.patches_.size());
    r.patches_.push_back(std::move(patch));
  }
  return r;
}

}  // namespace smt
