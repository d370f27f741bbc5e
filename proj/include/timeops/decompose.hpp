#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "timeops/spectra.hpp"

namespace timeops {

/// One multiplicity copy of one eigenvalue: `level` indexes the level list,
/// `copy` runs over 0..multiplicity-1.
struct Slot {
  std::size_t level;
  std::size_t copy;

  friend bool operator==(const Slot&, const Slot&) = default;
};

/// Splitting of a (possibly degenerate) point spectrum into simple channels.
///
/// `channels[j]` lists slot indices in extraction order, which is also the
/// order of increasing bucket level `certificates[j]`. Bucketing happens on
/// prescale * |a| where a is the level value (ToZero) or its reciprocal
/// (ToInfinity).
struct ChannelDecomposition {
  std::vector<SpectralEntry> levels;
  Accumulation accumulation = Accumulation::ToZero;
  std::vector<Slot> slots;
  std::vector<std::vector<std::size_t>> channels;
  std::vector<std::vector<int>> certificates;
  double p = 2.0;
  double prescale = 1.0;

  std::size_t channel_count() const { return channels.size(); }
  std::size_t slot_count() const { return slots.size(); }

  /// Eigenvalues carried by channel j, in channel order.
  VectorXd channel_values(std::size_t j) const;
};

/// Unique k >= 1 with 1/(k+1) < |a| <= 1/k. Throws unless 0 < |a| <= 1.
int bucket_index(double a);

/// Greedy square-summable partition of a finite null sequence.
///
/// Values are scaled by `prescale` (default 1/max|a|) and bucketed once; each
/// round takes, from every non-empty bucket among the remaining elements, the
/// element of lowest original index and makes the round's picks a channel.
/// Slot i is value i of the input. Throws on zero or repeated values.
ChannelDecomposition partition_null_sequence(std::span<const double> values, double p = 2.0,
                                             std::optional<double> prescale = std::nullopt);

/// Channel decomposition of an arbitrary sorted level list.
///
/// Copy k of every level with multiplicity > k joins column k; each column is
/// partitioned with partition_null_sequence using one prescale for the whole
/// spectrum, and the column channels are concatenated. For ToInfinity the
/// partition runs on reciprocals. Levels need not satisfy the sign convention
/// of DiscreteSpectrum, only be nonzero, distinct and sorted.
ChannelDecomposition decompose_levels(std::span<const SpectralEntry> levels,
                                      Accumulation accumulation, double p = 2.0);

ChannelDecomposition decompose_spectrum(const DiscreteSpectrum& s, double p = 2.0);

struct DecompositionReport {
  bool disjoint_cover = true;
  bool simple_channels = true;
  bool increasing_buckets = true;
  bool certificates_consistent = true;
  bool certificate_bound = true;
  /// Per channel: sum_n 1/k_n^p over occupied bucket levels.
  std::vector<double> certificate_sums;
  /// Per channel: sum_{k=1}^{k_last} 1/k^p, the partial zeta bound.
  std::vector<double> partial_zeta;
  double zeta_p = 0.0;
  std::vector<std::string> violations;

  bool ok() const {
    return disjoint_cover && simple_channels && increasing_buckets && certificates_consistent &&
           certificate_bound;
  }
};

/// Checks every structural invariant of a decomposition; violations are
/// collected in the report, never thrown.
DecompositionReport verify_decomposition(const ChannelDecomposition& c);

}  // namespace timeops
