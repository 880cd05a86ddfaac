#include "srl/localizer.hpp"

#include <algorithm>
#include <cmath>

#include "srl/errors.hpp"

namespace srl {

namespace {

constexpr double kMinWeightDistance = 1e-12;

void check_query(const FingerprintDatabase& db, const Fingerprint& query,
                 const LocalizerConfig& cfg) {
  if (db.points.empty()) fail(Errc::EmptyDatabase, "database has no RPs");
  if (query.ap_count() != db.ap_count()) {
    fail(Errc::DimensionMismatch, "query AP count disagrees with database");
  }
  if (cfg.k < 1 || static_cast<std::size_t>(cfg.k) > db.size()) {
    fail(Errc::InvalidConfig, "k must satisfy 1 <= k <= M");
  }
}

/// k smallest records by (scaled distance, RP index). The index tie-break
/// keeps estimates deterministic.
std::vector<Neighbor> select_nearest(std::vector<DistanceRecord> records,
                                     int k) {
  std::partial_sort(records.begin(), records.begin() + k, records.end(),
                    [](const DistanceRecord& a, const DistanceRecord& b) {
                      if (a.scaled_distance != b.scaled_distance) {
                        return a.scaled_distance < b.scaled_distance;
                      }
                      return a.rp_index < b.rp_index;
                    });
  std::vector<Neighbor> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    out.push_back({records[i].rp_index, records[i].scaled_distance});
  }
  return out;
}

Point2 centroid(const FingerprintDatabase& db,
                std::span<const Neighbor> neighbors) {
  Point2 sum;
  for (const Neighbor& nb : neighbors) {
    sum.x += db.points[nb.rp_index].location.x;
    sum.y += db.points[nb.rp_index].location.y;
  }
  const double n = static_cast<double>(neighbors.size());
  return {sum.x / n, sum.y / n};
}

}  // namespace

const char* algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::ClassicKnn: return "classic";
    case Algorithm::Wknn: return "wknn";
    case Algorithm::SrlKnn: return "srl";
    case Algorithm::SrlKnnHistogram: return "srl-hist";
    case Algorithm::SrlKnnCombined: return "srl-combined";
  }
  return "?";
}

bool algorithm_uses_prior(Algorithm algo) {
  return algo == Algorithm::SrlKnn || algo == Algorithm::SrlKnnHistogram ||
         algo == Algorithm::SrlKnnCombined;
}

Point2 inverse_distance_average(const FingerprintDatabase& db,
                                std::span<const Neighbor> neighbors) {
  std::vector<Neighbor> exact;
  for (const Neighbor& nb : neighbors) {
    if (nb.scaled_distance == 0.0) exact.push_back(nb);
  }
  if (!exact.empty()) return centroid(db, exact);

  double wx = 0.0, wy = 0.0, wsum = 0.0;
  for (const Neighbor& nb : neighbors) {
    const double w = 1.0 / std::max(nb.scaled_distance, kMinWeightDistance);
    const Point2& loc = db.points[nb.rp_index].location;
    wx += w * loc.x;
    wy += w * loc.y;
    wsum += w;
  }
  return {wx / wsum, wy / wsum};
}

Estimate locate_classic_knn(const FingerprintDatabase& db,
                            const Fingerprint& query,
                            const LocalizerConfig& cfg) {
  check_query(db, query, cfg);
  auto records = compute_distance_records(db, query, cfg.primary_feature,
                                          std::nullopt, false);
  Estimate est;
  est.algorithm = Algorithm::ClassicKnn;
  est.neighbors = select_nearest(std::move(records), cfg.k);
  est.location = centroid(db, est.neighbors);
  return est;
}

Estimate locate_wknn(const FingerprintDatabase& db, const Fingerprint& query,
                     const LocalizerConfig& cfg) {
  check_query(db, query, cfg);
  auto records = compute_distance_records(db, query, cfg.primary_feature,
                                          std::nullopt, false);
  Estimate est;
  est.algorithm = Algorithm::Wknn;
  est.neighbors = select_nearest(std::move(records), cfg.k);
  est.location = inverse_distance_average(db, est.neighbors);
  return est;
}

Estimate locate_srl_knn(const FingerprintDatabase& db, const Fingerprint& query,
                        const Point2& prev, const LocalizerConfig& cfg) {
  check_query(db, query, cfg);
  if (cfg.sigma <= 0.0) fail(Errc::InvalidConfig, "sigma must be positive");
  const PenaltyParams params{prev, cfg.sigma};
  auto records = compute_distance_records(db, query, cfg.primary_feature,
                                          params, false);
  Estimate est;
  est.algorithm = Algorithm::SrlKnn;
  est.neighbors = select_nearest(std::move(records), cfg.k);
  est.location = inverse_distance_average(db, est.neighbors);
  return est;
}

Estimate locate_srl_histogram(const FingerprintDatabase& db,
                              const Fingerprint& query, const Point2& prev,
                              const LocalizerConfig& cfg) {
  check_query(db, query, cfg);
  if (cfg.sigma <= 0.0) fail(Errc::InvalidConfig, "sigma must be positive");
  const PenaltyParams params{prev, cfg.sigma};
  auto records =
      compute_distance_records(db, query, FeatureKind::Mean, params, true);
  Estimate est;
  est.algorithm = Algorithm::SrlKnnHistogram;
  est.neighbors = select_nearest(std::move(records), cfg.k);
  est.location = inverse_distance_average(db, est.neighbors);
  return est;
}

Estimate locate_srl_combined(const FingerprintDatabase& db,
                             const Fingerprint& query, const Point2& prev,
                             const LocalizerConfig& cfg) {
  check_query(db, query, cfg);
  if (cfg.sigma <= 0.0) fail(Errc::InvalidConfig, "sigma must be positive");
  if (cfg.n <= cfg.k || static_cast<std::size_t>(cfg.n) > db.size()) {
    fail(Errc::InvalidStageSizes, "combined mode requires k < n <= M");
  }
  const PenaltyParams params{prev, cfg.sigma};
  const double weight_sum = penalty_weight_sum(db, params);

  // Stage 1: n candidates by the primary (rank / pair-diff) feature.
  auto stage1 = compute_distance_records(
      db, query, cfg.primary_feature,
      cfg.stage1_penalty ? std::optional<PenaltyParams>(params) : std::nullopt,
      false);
  std::vector<Neighbor> candidates = select_nearest(std::move(stage1), cfg.n);

  // Stage 2: re-rank the survivors by penalty-scaled mean-RSSI distance.
  std::vector<DistanceRecord> stage2;
  stage2.reserve(candidates.size());
  for (const Neighbor& nb : candidates) {
    const ReferencePoint& rp = db.points[nb.rp_index];
    DistanceRecord rec;
    rec.rp_index = nb.rp_index;
    rec.raw_distance = euclidean_distance(query.mean, rp.fingerprint.mean);
    rec.penalty_weight = penalty_weight(rp.location, params);
    rec.scaled_distance = rec.penalty_weight * rec.raw_distance / weight_sum;
    stage2.push_back(rec);
  }

  Estimate est;
  est.algorithm = Algorithm::SrlKnnCombined;
  est.neighbors = select_nearest(std::move(stage2), cfg.k);
  est.location = inverse_distance_average(db, est.neighbors);
  return est;
}

Estimate locate(const FingerprintDatabase& db, const Fingerprint& query,
                const std::optional<Point2>& prev,
                const LocalizerConfig& cfg) {
  if (algorithm_uses_prior(cfg.algorithm) && !prev) {
    fail(Errc::InvalidConfig, "SRL variants need a previous position");
  }
  switch (cfg.algorithm) {
    case Algorithm::ClassicKnn: return locate_classic_knn(db, query, cfg);
    case Algorithm::Wknn: return locate_wknn(db, query, cfg);
    case Algorithm::SrlKnn: return locate_srl_knn(db, query, *prev, cfg);
    case Algorithm::SrlKnnHistogram:
      return locate_srl_histogram(db, query, *prev, cfg);
    case Algorithm::SrlKnnCombined:
      return locate_srl_combined(db, query, *prev, cfg);
  }
  fail(Errc::InvalidConfig, "unknown algorithm");
}

}  // namespace srl
