#pragma once

#include <optional>
#include <span>
#include <vector>

#include "srl/fingerprint.hpp"
#include "srl/types.hpp"

namespace srl {

/// Soft-range penalty parameters: the most recent previous position and
/// sigma = v_max * dt, the largest plausible displacement per interval.
struct PenaltyParams {
  Point2 prev_location;
  double sigma = 2.0;  // meters
};

/// Per-RP distance bookkeeping for one query.
struct DistanceRecord {
  std::size_t rp_index = 0;
  double raw_distance = 0.0;     // D (Euclidean or histogram-weighted)
  double penalty_weight = 1.0;   // W, exp(d^2 / 4 sigma^2)
  double scaled_distance = 0.0;  // W * D / sum(W)
};

/// Plain Euclidean distance between equally-sized feature vectors.
double euclidean_distance(std::span<const double> query,
                          std::span<const double> rp);

/// exp(d^2 / (4 sigma^2)) where d is the physical distance from the RP to
/// the previous position. Monotone in d, 1 at d = 0. The exponent is
/// clamped at 700 so far RPs stay finite while keeping their ordering.
double penalty_weight(const Point2& rp_location, const PenaltyParams& params);

/// Scales a raw fingerprint distance by the soft-range penalty, normalized
/// by the query-wide weight sum over all M RPs.
double srl_distance(double raw_distance, const Point2& rp_location,
                    const PenaltyParams& params, double weight_sum);

/// Histogram-weighted fingerprint distance: per AP, the squared gap between
/// the query mean and every occupied bin, weighted by bin probability. APs
/// whose histogram is empty (never heard during training) contribute
/// nothing.
double histogram_distance(std::span<const double> query_means,
                          const RssiHistogram& rp_hist);

/// Same contract as srl_distance with the histogram distance as D.
double srl_histogram_distance(double hist_distance, const Point2& rp_location,
                              const PenaltyParams& params, double weight_sum);

/// Euclidean distance between two AP rank vectors; both must be
/// permutations of 1..P.
double spearman_rank_distance(std::span<const double> query_ranks,
                              std::span<const double> rp_ranks);

/// Sum of penalty weights over every RP in the database. Query-constant, so
/// it is computed once and shared across all DistanceRecords.
double penalty_weight_sum(const FingerprintDatabase& db,
                          const PenaltyParams& params);

/// Distance records for one query against every RP. With no penalty params
/// the scaled distance equals the raw one. When use_histogram is set the
/// raw distance is the histogram-weighted distance against the query
/// means; otherwise Euclidean over the selected feature vector.
std::vector<DistanceRecord> compute_distance_records(
    const FingerprintDatabase& db, const Fingerprint& query,
    FeatureKind feature, const std::optional<PenaltyParams>& penalty,
    bool use_histogram);

}  // namespace srl
