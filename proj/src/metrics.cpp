#include "srl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "srl/errors.hpp"

namespace srl {

namespace {

constexpr double kMaxExponent = 700.0;  // exp stays finite

bool is_permutation_of_ranks(std::span<const double> ranks) {
  std::vector<int> seen(ranks.size(), 0);
  for (double r : ranks) {
    if (r != std::floor(r)) return false;
    const int v = static_cast<int>(r);
    if (v < 1 || static_cast<std::size_t>(v) > ranks.size()) return false;
    if (seen[v - 1]++) return false;
  }
  return true;
}

}  // namespace

double euclidean_distance(std::span<const double> query,
                          std::span<const double> rp) {
  if (query.size() != rp.size()) {
    fail(Errc::DimensionMismatch, "feature vectors disagree on length");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < query.size(); ++j) {
    const double d = query[j] - rp[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double penalty_weight(const Point2& rp_location, const PenaltyParams& params) {
  const double dx = rp_location.x - params.prev_location.x;
  const double dy = rp_location.y - params.prev_location.y;
  const double exponent =
      (dx * dx + dy * dy) / (4.0 * params.sigma * params.sigma);
  return std::exp(std::min(exponent, kMaxExponent));
}

double srl_distance(double raw_distance, const Point2& rp_location,
                    const PenaltyParams& params, double weight_sum) {
  return penalty_weight(rp_location, params) * raw_distance / weight_sum;
}

double histogram_distance(std::span<const double> query_means,
                          const RssiHistogram& rp_hist) {
  if (query_means.size() != rp_hist.per_ap.size()) {
    fail(Errc::DimensionMismatch, "query means disagree with histogram APs");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < query_means.size(); ++j) {
    const double f = query_means[j];
    const ApHistogram& hist = rp_hist.per_ap[j];
    if (hist.empty()) continue;
    const double total = hist.total();
    for (const auto& [bin, count] : hist.counts) {
      const double d = f - double(bin);
      sum += (count / total) * d * d;
    }
  }
  return std::sqrt(sum);
}

double srl_histogram_distance(double hist_distance, const Point2& rp_location,
                              const PenaltyParams& params, double weight_sum) {
  return srl_distance(hist_distance, rp_location, params, weight_sum);
}

double spearman_rank_distance(std::span<const double> query_ranks,
                              std::span<const double> rp_ranks) {
  if (query_ranks.size() != rp_ranks.size()) {
    fail(Errc::DimensionMismatch, "rank vectors disagree on length");
  }
  if (!is_permutation_of_ranks(query_ranks) ||
      !is_permutation_of_ranks(rp_ranks)) {
    fail(Errc::NotAPermutation, "ranks must be a permutation of 1..P");
  }
  return euclidean_distance(query_ranks, rp_ranks);
}

double penalty_weight_sum(const FingerprintDatabase& db,
                          const PenaltyParams& params) {
  double sum = 0.0;
  for (const ReferencePoint& rp : db.points) {
    sum += penalty_weight(rp.location, params);
  }
  return sum;
}

std::vector<DistanceRecord> compute_distance_records(
    const FingerprintDatabase& db, const Fingerprint& query,
    FeatureKind feature, const std::optional<PenaltyParams>& penalty,
    bool use_histogram) {
  if (db.points.empty()) fail(Errc::EmptyDatabase, "database has no RPs");

  // Without a penalty every weight is 1 and no normalization applies, so
  // the scaled distance reduces to the raw one.
  const double weight_sum = penalty ? penalty_weight_sum(db, *penalty) : 1.0;

  std::vector<DistanceRecord> records;
  records.reserve(db.points.size());
  for (std::size_t i = 0; i < db.points.size(); ++i) {
    const ReferencePoint& rp = db.points[i];
    DistanceRecord rec;
    rec.rp_index = i;
    rec.raw_distance =
        use_histogram
            ? histogram_distance(query.mean, rp.fingerprint.histogram)
            : euclidean_distance(query.features(feature),
                                 rp.fingerprint.features(feature));
    rec.penalty_weight = penalty ? penalty_weight(rp.location, *penalty) : 1.0;
    rec.scaled_distance = rec.penalty_weight * rec.raw_distance / weight_sum;
    records.push_back(rec);
  }
  return records;
}

}  // namespace srl
