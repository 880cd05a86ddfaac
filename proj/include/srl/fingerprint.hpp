#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "srl/types.hpp"

namespace srl {

/// Sparse 1-dBm histogram for one AP at one location. Bins are centered on
/// integer dBm values, i.e. bin R covers [R-0.5, R+0.5). Counts are kept
/// instead of probabilities so the scan count stays recoverable.
struct ApHistogram {
  std::map<int, int> counts;  // bin center -> number of readings

  int total() const;
  bool empty() const { return counts.empty(); }
  int min_bin() const;  // R_L; histogram must be non-empty
  int max_bin() const;  // R_U
  double probability(int rssi) const;
  double mean() const;      // 0 when empty
  double variance() const;  // population variance over bins, 0 when empty

  friend bool operator==(const ApHistogram&, const ApHistogram&) = default;
};

struct RssiHistogram {
  std::vector<ApHistogram> per_ap;

  friend bool operator==(const RssiHistogram&, const RssiHistogram&) = default;
};

/// Pair differences grow as P^2; above this AP count they are not
/// materialized and the pair-diff feature is unavailable.
inline constexpr std::size_t kMaxPairDiffAps = 64;

/// Per-location feature bundle built from a set of RSSI scans.
struct Fingerprint {
  std::vector<double> mean;    // dBm, one per AP
  std::vector<double> stddev;  // dB, population formula
  RssiHistogram histogram;
  std::vector<double> ranks;       // permutation of 1..P, 1 = strongest
  std::vector<double> pair_diffs;  // mean[j] - mean[k] for j < k, canonical order

  std::size_t ap_count() const { return mean.size(); }
  const std::vector<double>& features(FeatureKind kind) const;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

/// Index of pair (j, k), j < k, in the canonical pair_diffs layout.
std::size_t pair_index(std::size_t j, std::size_t k, std::size_t ap_count);

/// Signed mean difference mean[j] - mean[k] for any j != k.
double pair_difference(const Fingerprint& fp, std::size_t j, std::size_t k);

struct ReferencePoint {
  Point2 location;
  Fingerprint fingerprint;
  int scan_count = 0;  // S1

  friend bool operator==(const ReferencePoint&,
                         const ReferencePoint&) = default;
};

struct FingerprintDatabase {
  std::vector<ApId> aps;
  std::vector<ReferencePoint> points;
  double grid_size = 0.0;  // meters between adjacent RPs; 0 = unknown

  std::size_t ap_count() const { return aps.size(); }
  std::size_t size() const { return points.size(); }

  friend bool operator==(const FingerprintDatabase&,
                         const FingerprintDatabase&) = default;
};

/// Builds the full feature bundle from training scans. Mean/std honor the
/// missing-value policy; the histogram always covers heard readings only,
/// rounded to the nearest 1-dBm bin. Ranks order APs by descending mean
/// with ties going to the lower AP index.
Fingerprint build_fingerprint(std::span<const RssiScan> scans,
                              const MissingValuePolicy& policy);

/// Same construction applied to the (few) test-time scans. With a single
/// scan the stddev is 0 and each histogram is a single bin.
Fingerprint query_fingerprint(std::span<const RssiScan> scans,
                              const MissingValuePolicy& policy);

/// Probability mass of bin `rssi` for the given AP; 0 outside [R_L, R_U].
double histogram_bin_probability(const RssiHistogram& hist, int ap, int rssi);

/// Recomputes ranks and pair_diffs from the mean vector (used after
/// deserialization and when a mean fingerprint is transplanted).
void rebuild_derived_features(Fingerprint& fp);

}  // namespace srl
