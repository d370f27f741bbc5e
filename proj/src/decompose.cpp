#include "timeops/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace timeops {

namespace {

// prescale * |a|, with the round-off overshoot of (1/x) * x folded back to 1.
double scaled_magnitude(double a, double prescale) {
  const double m = prescale * std::abs(a);
  if (m > 1.0 && m <= 1.0 + 4 * std::numeric_limits<double>::epsilon()) return 1.0;
  return m;
}

struct Partition {
  std::vector<std::vector<std::size_t>> channels;  // local indices
  std::vector<std::vector<int>> buckets;
};

Partition partition_core(const std::vector<int>& bucket_of) {
  Partition out;
  std::vector<bool> taken(bucket_of.size(), false);
  std::size_t remaining = bucket_of.size();
  while (remaining > 0) {
    // Lowest original index per non-empty bucket, buckets ascending.
    std::map<int, std::size_t> pick;
    for (std::size_t i = 0; i < bucket_of.size(); ++i)
      if (!taken[i]) pick.try_emplace(bucket_of[i], i);
    std::vector<std::size_t> channel;
    std::vector<int> levels;
    for (const auto& [k, i] : pick) {
      channel.push_back(i);
      levels.push_back(k);
      taken[i] = true;
    }
    remaining -= channel.size();
    out.channels.push_back(std::move(channel));
    out.buckets.push_back(std::move(levels));
  }
  return out;
}

double max_abs(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

VectorXd ChannelDecomposition::channel_values(std::size_t j) const {
  const auto& ch = channels.at(j);
  VectorXd v(static_cast<Index>(ch.size()));
  for (std::size_t i = 0; i < ch.size(); ++i)
    v[static_cast<Index>(i)] = levels[slots[ch[i]].level].value;
  return v;
}

int bucket_index(double a) {
  const double m = std::abs(a);
  if (!(m > 0.0) || m > 1.0 || !std::isfinite(m))
    throw std::invalid_argument("bucket_index: need 0 < |a| <= 1");
  const double guess = std::floor(1.0 / m);
  if (guess > static_cast<double>(std::numeric_limits<int>::max() - 2))
    throw std::invalid_argument("bucket_index: |a| too small for an int bucket");
  int k = std::max(1, static_cast<int>(guess));
  // Settle round-off in 1/m against the defining inequalities.
  while (k > 1 && m > 1.0 / k) --k;
  while (m <= 1.0 / (k + 1.0)) ++k;
  return k;
}

ChannelDecomposition partition_null_sequence(std::span<const double> values, double p,
                                             std::optional<double> prescale) {
  if (!(p > 1.0)) throw std::invalid_argument("partition_null_sequence: p must exceed 1");
  if (values.empty()) throw std::invalid_argument("partition_null_sequence: empty sequence");
  {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("partition_null_sequence: values must be pairwise distinct");
    for (double v : sorted)
      if (v == 0.0 || !std::isfinite(v))
        throw std::invalid_argument("partition_null_sequence: values must be finite and nonzero");
  }
  const double s = prescale ? *prescale : 1.0 / max_abs(values);
  if (!(s > 0.0)) throw std::invalid_argument("partition_null_sequence: prescale must be positive");

  std::vector<int> bucket_of;
  bucket_of.reserve(values.size());
  for (double v : values) bucket_of.push_back(bucket_index(scaled_magnitude(v, s)));
  Partition part = partition_core(bucket_of);

  ChannelDecomposition out;
  out.p = p;
  out.prescale = s;
  out.accumulation = Accumulation::ToZero;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.levels.push_back({values[i], 1});
    out.slots.push_back({i, 0});
  }
  out.channels = std::move(part.channels);
  out.certificates = std::move(part.buckets);
  return out;
}

ChannelDecomposition decompose_levels(std::span<const SpectralEntry> levels,
                                      Accumulation accumulation, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("decompose: p must exceed 1");
  if (levels.empty()) throw std::invalid_argument("decompose: empty level list");

  std::vector<double> keys;  // value or reciprocal that gets bucketed
  keys.reserve(levels.size());
  int max_mult = 0;
  for (std::size_t n = 0; n < levels.size(); ++n) {
    const auto& e = levels[n];
    if (e.value == 0.0) throw std::invalid_argument("decompose: zero eigenvalue present");
    if (e.multiplicity < 1) throw std::invalid_argument("decompose: multiplicity < 1");
    if (n > 0 && !(levels[n - 1].value < e.value))
      throw std::invalid_argument("decompose: levels must be strictly increasing");
    keys.push_back(accumulation == Accumulation::ToZero ? e.value : 1.0 / e.value);
    max_mult = std::max(max_mult, e.multiplicity);
  }

  ChannelDecomposition out;
  out.levels.assign(levels.begin(), levels.end());
  out.accumulation = accumulation;
  out.p = p;
  out.prescale = 1.0 / max_abs(keys);

  std::vector<std::size_t> first_slot(levels.size());
  for (std::size_t n = 0; n < levels.size(); ++n) {
    first_slot[n] = out.slots.size();
    for (int k = 0; k < levels[n].multiplicity; ++k)
      out.slots.push_back({n, static_cast<std::size_t>(k)});
  }

  for (int k = 0; k < max_mult; ++k) {
    std::vector<std::size_t> members;
    std::vector<double> column;
    for (std::size_t n = 0; n < levels.size(); ++n) {
      if (levels[n].multiplicity > k) {
        members.push_back(n);
        column.push_back(keys[n]);
      }
    }
    const ChannelDecomposition part = partition_null_sequence(column, p, out.prescale);
    for (std::size_t c = 0; c < part.channels.size(); ++c) {
      std::vector<std::size_t> channel;
      for (std::size_t local : part.channels[c])
        channel.push_back(first_slot[members[local]] + static_cast<std::size_t>(k));
      out.channels.push_back(std::move(channel));
      out.certificates.push_back(part.certificates[c]);
    }
  }
  return out;
}

ChannelDecomposition decompose_spectrum(const DiscreteSpectrum& s, double p) {
  return decompose_levels(s.entries(), s.accumulation(), p);
}

DecompositionReport verify_decomposition(const ChannelDecomposition& c) {
  DecompositionReport r;
  auto fail = [&r](bool& flag, const std::string& msg) {
    flag = false;
    r.violations.push_back(msg);
  };

  std::vector<int> seen(c.slots.size(), 0);
  for (std::size_t j = 0; j < c.channels.size(); ++j) {
    for (std::size_t s : c.channels[j]) {
      if (s >= c.slots.size()) {
        fail(r.disjoint_cover, "channel " + std::to_string(j) + " references unknown slot");
        continue;
      }
      ++seen[s];
    }
  }
  for (std::size_t s = 0; s < seen.size(); ++s) {
    if (seen[s] != 1)
      fail(r.disjoint_cover,
           "slot " + std::to_string(s) + " covered " + std::to_string(seen[s]) + " times");
  }

  if (c.certificates.size() != c.channels.size())
    fail(r.certificates_consistent, "certificate list does not match channel list");

  r.zeta_p = c.p > 1.0 ? std::riemann_zeta(c.p) : std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < c.channels.size(); ++j) {
    const auto& ch = c.channels[j];
    std::vector<double> vals;
    for (std::size_t s : ch)
      if (s < c.slots.size() && c.slots[s].level < c.levels.size())
        vals.push_back(c.levels[c.slots[s].level].value);
    std::sort(vals.begin(), vals.end());
    if (std::adjacent_find(vals.begin(), vals.end()) != vals.end())
      fail(r.simple_channels, "channel " + std::to_string(j) + " repeats an eigenvalue");

    if (j >= c.certificates.size()) {
      r.certificate_sums.push_back(0.0);
      r.partial_zeta.push_back(0.0);
      continue;
    }
    const auto& cert = c.certificates[j];
    if (cert.size() != ch.size())
      fail(r.certificates_consistent,
           "channel " + std::to_string(j) + " certificate length mismatch");
    for (std::size_t i = 1; i < cert.size(); ++i)
      if (!(cert[i - 1] < cert[i]))
        fail(r.increasing_buckets,
             "channel " + std::to_string(j) + " bucket levels not strictly increasing");
    for (std::size_t i = 0; i < std::min(cert.size(), ch.size()); ++i) {
      if (ch[i] >= c.slots.size()) continue;
      const double v = c.levels[c.slots[ch[i]].level].value;
      const double key = c.accumulation == Accumulation::ToZero ? v : 1.0 / v;
      const double m = scaled_magnitude(key, c.prescale);
      if (!(m > 0.0 && m <= 1.0) || bucket_index(m) != cert[i])
        fail(r.certificates_consistent,
             "channel " + std::to_string(j) + " certificate disagrees with value bucket");
    }

    double sum = 0.0;
    int k_last = 0;
    for (int k : cert) {
      sum += std::pow(static_cast<double>(k), -c.p);
      k_last = std::max(k_last, k);
    }
    double partial = 0.0;
    for (int k = 1; k <= k_last; ++k) partial += std::pow(static_cast<double>(k), -c.p);
    r.certificate_sums.push_back(sum);
    r.partial_zeta.push_back(partial);
    // Tiny slack: both sides are accumulated in floating point.
    if (!(sum <= partial * (1 + 1e-14) && partial <= r.zeta_p * (1 + 1e-14)))
      fail(r.certificate_bound, "channel " + std::to_string(j) + " exceeds the zeta bound");
  }
  return r;
}

}  // namespace timeops
