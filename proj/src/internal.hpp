#pragma once

// Helpers shared by the pipeline driver and the acceptance suite.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "timeops/pipeline.hpp"
#include "timeops/sampling.hpp"
#include "timeops/timeop.hpp"

namespace timeops::detail {

/// Independent stream `stream` of the run seed, so work items can be
/// distributed over threads without changing the numbers they see.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

/// Runs f(0..n-1) on up to `jobs` threads. The first exception is rethrown
/// after all workers have joined.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Pass/fail records; every bound names the tolerance it came from.
class CheckList {
 public:
  explicit CheckList(const Tolerances& tolerances) : tolerances_(tolerances) {}

  /// value <= tolerance * scale
  bool at_most(const std::string& name, double value, const std::string& tolerance,
               double scale = 1.0) {
    const double bound = tolerances_.get(tolerance) * scale;
    const bool ok = value <= bound;
    checks_.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance},
                       {"bound", bound}, {"passed", ok}});
    return record(ok);
  }
  /// value >= bound, bound derived by the caller
  bool at_least(const std::string& name, double value, double bound) {
    const bool ok = value >= bound;
    checks_.push_back({{"name", name}, {"value", value}, {"bound", bound}, {"passed", ok}});
    return record(ok);
  }
  bool holds(const std::string& name, bool ok) {
    checks_.push_back({{"name", name}, {"passed", ok}});
    return record(ok);
  }

  bool passed() const { return passed_; }
  const json& to_json() const { return checks_; }

 private:
  bool record(bool ok) {
    passed_ = passed_ && ok;
    return ok;
  }

  const Tolerances& tolerances_;
  json checks_ = json::array();
  bool passed_ = true;
};

struct PairwiseCcr {
  double max_residual = 0.0;
  std::size_t pairs = 0;
  bool exhaustive = true;
};

/// Largest ||[H,T] v + i v|| over v = e_k - e_l. All pairs when the channel
/// has at most `exhaustive_limit` elements, otherwise `samples` random pairs.
inline PairwiseCcr pairwise_ccr(const TimeOperatorMatrixd& t, Rng& rng, std::size_t samples,
                                Index exhaustive_limit = 64) {
  const Index n = t.dimension();
  const VectorXd h = t.generator();
  PairwiseCcr out;
  auto one = [&](Index k, Index l) {
    VectorXcd v = VectorXcd::Zero(n);
    v[k] = 1.0;
    v[l] = -1.0;
    out.max_residual = std::max(out.max_residual, ccr_residual<double>(h, t.data, v));
    ++out.pairs;
  };
  if (n <= exhaustive_limit) {
    for (Index k = 0; k < n; ++k)
      for (Index l = k + 1; l < n; ++l) one(k, l);
    return out;
  }
  out.exhaustive = false;
  std::uniform_int_distribution<Index> pick(0, n - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    const Index k = pick(rng);
    Index l = pick(rng);
    while (l == k) l = pick(rng);
    one(k, l);
  }
  return out;
}

/// Lowest `count` eigenvalues of the truncated Rabi Hamiltonian.
VectorXd rabi_lowest(double mu, double omega, double g, int cutoff, Index count);

struct UwStatistics {
  double max_ccr_residual = 0.0;     // relative to ||phi|| ||psi||
  double min_uncertainty_value = 0.0;
  double max_im_identity_defect = 0.0;
  std::size_t samples = 0;           // zero when the domain is {0}
};

/// Ultra-weak CCR residuals over `samples` random pairs and uncertainty
/// products over `samples` random (a, b, psi), all drawn from `rng`.
UwStatistics uw_statistics(const SesquilinearForm& form, Rng& rng, std::size_t samples,
                           double uncertainty_tol);

json uw_statistics_to_json(const UwStatistics& s);

}  // namespace timeops::detail
