#pragma once

#include <optional>
#include <vector>

#include "srl/fingerprint.hpp"
#include "srl/metrics.hpp"
#include "srl/types.hpp"

namespace srl {

enum class Algorithm {
  ClassicKnn,       // unweighted average of the K nearest (RADAR-style)
  Wknn,             // inverse-distance weighted average
  SrlKnn,           // soft range limited, any feature vector
  SrlKnnHistogram,  // soft range limited, histogram distance
  SrlKnnCombined,   // rank/pair-diff pre-selection of n, mean refinement to K
};

const char* algorithm_name(Algorithm algo);

struct LocalizerConfig {
  Algorithm algorithm = Algorithm::SrlKnn;
  int k = 3;           // final neighbour count
  int n = 7;           // combined mode first-stage candidates, k < n <= M
  double sigma = 2.0;  // meters, v_max * dt
  FeatureKind primary_feature = FeatureKind::Mean;
  bool stage1_penalty = true;  // combined mode: apply the penalty in stage 1
  MissingValuePolicy missing_policy{};
};

struct Neighbor {
  std::size_t rp_index = 0;
  double scaled_distance = 0.0;
};

struct Estimate {
  Point2 location;
  std::vector<Neighbor> neighbors;  // k entries, ascending scaled distance
  Algorithm algorithm = Algorithm::ClassicKnn;
};

Estimate locate_classic_knn(const FingerprintDatabase& db,
                            const Fingerprint& query,
                            const LocalizerConfig& cfg);

Estimate locate_wknn(const FingerprintDatabase& db, const Fingerprint& query,
                     const LocalizerConfig& cfg);

Estimate locate_srl_knn(const FingerprintDatabase& db, const Fingerprint& query,
                        const Point2& prev, const LocalizerConfig& cfg);

/// SRL-KNN with the histogram-weighted distance. The query features F_j are
/// the per-AP means of the test scans, i.e. query.mean.
Estimate locate_srl_histogram(const FingerprintDatabase& db,
                              const Fingerprint& query, const Point2& prev,
                              const LocalizerConfig& cfg);

/// Two-stage fingerprint combination: stage 1 keeps the n best RPs by the
/// configured primary feature (rank or pair-diff), stage 2 re-ranks those n
/// by mean-RSSI distance and keeps k.
Estimate locate_srl_combined(const FingerprintDatabase& db,
                             const Fingerprint& query, const Point2& prev,
                             const LocalizerConfig& cfg);

/// Dispatch on cfg.algorithm. SRL variants require prev.
Estimate locate(const FingerprintDatabase& db, const Fingerprint& query,
                const std::optional<Point2>& prev, const LocalizerConfig& cfg);

bool algorithm_uses_prior(Algorithm algo);

/// Inverse-distance weighted average of neighbour locations. Exact matches
/// (distance 0) take over: the result is then the unweighted centroid of
/// the zero-distance neighbours. Nonzero distances are clamped at 1e-12.
Point2 inverse_distance_average(const FingerprintDatabase& db,
                                std::span<const Neighbor> neighbors);

}  // namespace srl
