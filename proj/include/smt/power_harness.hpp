#pragma once

// Seeded Monte Carlo engine for empirical power, level and null diagnostics.
//
// Replication r of a test configuration uses the stream
// (seed, hash(alpha, rho, n, r)), so results depend only on the parameter
// values and never on scheduling, thread count or the order of grid lists.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "smt/fields.hpp"
#include "smt/memory_test.hpp"
#include "smt/stable_core.hpp"

namespace smt {

/// Worker count: `requested` if nonzero, else hardware concurrency capped by
/// the SMT_THREADS environment variable when it holds a positive integer.
inline unsigned resolve_threads(unsigned requested = 0) {
  if (requested > 0) return requested;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SMT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) threads = std::min(threads, static_cast<unsigned>(cap));
  }
  return threads;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown stops further work and is rethrown to the caller.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

inline RngStream replication_stream(std::uint64_t seed, const TestConfig& cfg, std::uint64_t rep) {
  std::uint64_t id = detail::splitmix64(std::bit_cast<std::uint64_t>(cfg.alpha.value()));
  id = detail::hash_combine(id, std::bit_cast<std::uint64_t>(cfg.rho));
  id = detail::hash_combine(id, static_cast<std::uint64_t>(cfg.n));
  id = detail::hash_combine(id, rep);
  return RngStream(seed, id);
}

/// One replication: realize the field on both test boxes and evaluate the statistic.
inline TestResult run_replication(const FieldSpec& field, const TestConfig& cfg,
                                  const RngStream& rng) {
  auto realization = realize(field, rng,
                             {origin_box(cfg.n, cfg.dim), shifted_box(cfg.n, cfg.rho, cfg.dim)});
  return compute_statistic(realization, cfg);
}

/// Full TestResult for each of `reps` replications, in replication order.
inline std::vector<TestResult> statistic_sample(const FieldSpec& field, const TestConfig& cfg,
                                                std::size_t reps, std::uint64_t seed,
                                                unsigned threads = 0) {
  cfg.validate();
  if (reps < 1) throw std::invalid_argument("replications must be at least 1");
  if (field.dim() != cfg.dim) throw std::invalid_argument("field and test dimensions differ");
  if (!(field.alpha() == cfg.alpha)) throw std::invalid_argument("field and test alpha differ");
  std::vector<TestResult> out(reps);
  parallel_for(reps, resolve_threads(threads), [&](std::size_t r) {
    out[r] = run_replication(field, cfg, replication_stream(seed, cfg, r));
  });
  return out;
}

inline std::size_t rejection_count(const FieldSpec& field, const TestConfig& cfg, std::size_t reps,
                                   std::uint64_t seed, unsigned threads = 0) {
  const auto results = statistic_sample(field, cfg, reps, seed, threads);
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const TestResult& t) { return t.reject; }));
}

/// Fraction of replications rejecting H0.
inline double empirical_power(const FieldSpec& field, const TestConfig& cfg, std::size_t reps,
                              std::uint64_t seed, unsigned threads = 0) {
  return static_cast<double>(rejection_count(field, cfg, reps, seed, threads)) /
         static_cast<double>(reps);
}

struct LevelResult {
  TestConfig config;
  double empirical_level = 0.0;
  std::size_t rejections = 0;
  std::size_t replications = 0;
};

/// Rejection frequency under a null field (i.i.d. or finite-kernel moving average).
inline LevelResult empirical_level(const FieldSpec& field, const TestConfig& cfg, std::size_t reps,
                                   std::uint64_t seed, unsigned threads = 0) {
  if (field.kind() != FieldKind::IidSas && field.kind() != FieldKind::FiniteKernelMA) {
    throw std::invalid_argument("level checks need a null field: iid or ma:<kernel>");
  }
  LevelResult out{cfg, 0.0, rejection_count(field, cfg, reps, seed, threads), reps};
  out.empirical_level = static_cast<double>(out.rejections) / static_cast<double>(reps);
  return out;
}

/// Raw T_n draws for comparison with null_cdf_T.
inline std::vector<double> null_statistic_sample(const FieldSpec& field, const TestConfig& cfg,
                                                 std::size_t reps, std::uint64_t seed,
                                                 unsigned threads = 0) {
  const auto results = statistic_sample(field, cfg, reps, seed, threads);
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& t : results) out.push_back(t.t_n);
  return out;
}

/// Two-sided Kolmogorov-Smirnov distance between the sample's empirical CDF
/// and `cdf`.
inline double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("KS distance needs a nonempty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

struct ExperimentGrid {
  FieldSpec field;  // alpha is replaced by each entry of `alphas`
  std::vector<double> alphas;
  std::vector<double> rhos;
  std::vector<Coord> ns;
  double beta = 0.1;
  std::size_t replications = 400;
  std::uint64_t seed = 0;
};

/// Rejection counts for one alpha, rows indexed by rho and columns by n.
struct PowerTable {
  FieldSpec field;
  Alpha alpha;
  double beta = 0.1;
  std::vector<double> rhos;
  std::vector<Coord> ns;
  std::vector<std::vector<std::size_t>> rejections;
  std::size_t replications = 0;
  std::uint64_t seed = 0;

  double power(std::size_t rho_index, std::size_t n_index) const {
    return static_cast<double>(rejections.at(rho_index).at(n_index)) /
           static_cast<double>(replications);
  }
};

inline std::vector<PowerTable> power_table(const ExperimentGrid& grid, unsigned threads = 0) {
  if (grid.alphas.empty() || grid.rhos.empty() || grid.ns.empty()) {
    throw std::invalid_argument("experiment grid lists must be nonempty");
  }
  if (grid.replications < 1) throw std::invalid_argument("replications must be at least 1");
  std::vector<PowerTable> tables;
  for (double a : grid.alphas) {
    const Alpha alpha(a);
    const FieldSpec field = grid.field.with_alpha(alpha);
    PowerTable table{field, alpha, grid.beta, grid.rhos, grid.ns, {}, grid.replications, grid.seed};
    for (double rho : grid.rhos) {
      auto& row = table.rejections.emplace_back();
      for (Coord n : grid.ns) {
        const TestConfig cfg{alpha, field.dim(), n, rho, grid.beta};
        row.push_back(rejection_count(field, cfg, grid.replications, grid.seed, threads));
      }
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

}  // namespace smt
