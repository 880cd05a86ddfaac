#include "srl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srl/errors.hpp"
#include "srl/metrics.hpp"

namespace srl {

PerturbationSpec PerturbationSpec::isotropic(double e, std::uint64_t seed) {
  PerturbationSpec spec;
  spec.error_magnitude = e;
  spec.sigma_x = e / std::sqrt(2.0);
  spec.sigma_y = e / std::sqrt(2.0);
  spec.seed = seed;
  return spec;
}

Point2 perturb_prior(const Point2& truth, const PerturbationSpec& spec,
                     Rng& rng) {
  return {truth.x + rng.normal(0.0, spec.sigma_x),
          truth.y + rng.normal(0.0, spec.sigma_y)};
}

namespace {

void finalize_stats(TrajectoryResult& result) {
  std::vector<double> errors;
  errors.reserve(result.steps.size());
  for (const StepResult& s : result.steps) errors.push_back(s.error);

  const double n = static_cast<double>(errors.size());
  const double sum = std::accumulate(errors.begin(), errors.end(), 0.0);
  result.mean_error = sum / n;
  double var = 0.0;
  for (double e : errors) {
    const double d = e - result.mean_error;
    var += d * d;
  }
  result.std_error = std::sqrt(var / n);
  result.max_error = *std::max_element(errors.begin(), errors.end());
  result.p80 = percentile(errors, 0.80);
  result.cdf = error_cdf(result);
}

}  // namespace

TrajectoryResult replay_trajectory(const FingerprintDatabase& db,
                                   const Trajectory& traj,
                                   const LocalizerConfig& cfg,
                                   const ReplayOptions& options) {
  if (traj.steps.empty()) fail(Errc::EmptyTrajectory, "trajectory has no steps");
  for (const TrajectoryStep& step : traj.steps) {
    if (step.scans.empty()) {
      fail(Errc::EmptyTrajectory, "trajectory step has no scans");
    }
    if (step.scans[0].size() != db.ap_count()) {
      fail(Errc::ConfigMismatch, "trajectory AP count disagrees with database");
    }
  }

  Rng rng(options.perturbation.seed);
  const bool uses_prior = algorithm_uses_prior(cfg.algorithm);

  std::optional<Point2> prior;
  if (traj.initial_position) {
    prior = *traj.initial_position;
  } else if (options.assume_known_start) {
    prior = traj.steps.front().truth;
  }
  if (prior && options.prior_mode == PriorMode::PerturbedTruth) {
    prior = perturb_prior(*prior, options.perturbation, rng);
  }

  TrajectoryResult result;
  result.steps.reserve(traj.steps.size());

  std::optional<std::vector<double>> prev_query_mean;
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const TrajectoryStep& step = traj.steps[t];
    const Fingerprint query = query_fingerprint(step.scans, cfg.missing_policy);

    bool stationary = false;
    if (options.stationary_alignment && prev_query_mean) {
      stationary = euclidean_distance(query.mean, *prev_query_mean) <
                   options.stationary_threshold_db;
    }

    Estimate est;
    if (!uses_prior || stationary) {
      LocalizerConfig wknn_cfg = cfg;
      wknn_cfg.algorithm = uses_prior ? Algorithm::Wknn : cfg.algorithm;
      est = locate(db, query, std::nullopt, wknn_cfg);
    } else if (!prior) {
      // No anchor for the first step: plain WKNN fallback.
      LocalizerConfig wknn_cfg = cfg;
      wknn_cfg.algorithm = Algorithm::Wknn;
      est = locate(db, query, std::nullopt, wknn_cfg);
    } else {
      est = locate(db, query, prior, cfg);
    }

    StepResult sr;
    sr.estimate = est.location;
    sr.truth = step.truth;
    sr.error = distance(est.location, step.truth);
    if (uses_prior) sr.prior = prior;
    result.steps.push_back(sr);

    switch (options.prior_mode) {
      case PriorMode::EstimatedPrior:
        prior = est.location;
        break;
      case PriorMode::TruthPrior:
        prior = step.truth;
        break;
      case PriorMode::PerturbedTruth:
        prior = perturb_prior(step.truth, options.perturbation, rng);
        break;
    }
    prev_query_mean = query.mean;
  }

  finalize_stats(result);
  return result;
}

TrajectoryResult merge_results(std::span<const TrajectoryResult> results) {
  TrajectoryResult merged;
  for (const TrajectoryResult& r : results) {
    merged.steps.insert(merged.steps.end(), r.steps.begin(), r.steps.end());
  }
  if (merged.steps.empty()) fail(Errc::EmptyTrajectory, "nothing to merge");
  finalize_stats(merged);
  return merged;
}

std::vector<CdfPoint> error_cdf(const TrajectoryResult& result) {
  if (result.steps.empty()) fail(Errc::EmptyTrajectory, "no errors recorded");
  std::vector<double> errors;
  errors.reserve(result.steps.size());
  for (const StepResult& s : result.steps) errors.push_back(s.error);
  std::sort(errors.begin(), errors.end());

  std::vector<CdfPoint> cdf;
  cdf.reserve(errors.size());
  const std::size_t n = errors.size();
  if (n == 1) {
    cdf.push_back({errors[0], 1.0});
    return cdf;
  }
  for (std::size_t i = 0; i < n; ++i) {
    cdf.push_back({errors[i], static_cast<double>(i) / (n - 1)});
  }
  return cdf;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) fail(Errc::EmptyTrajectory, "percentile of nothing");
  if (p < 0.0 || p > 1.0) fail(Errc::InvalidConfig, "percentile outside [0,1]");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double h = (values.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - lo;
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double percentile_from_cdf(std::span<const CdfPoint> cdf, double p) {
  if (cdf.empty()) fail(Errc::EmptyTrajectory, "empty CDF");
  if (p <= cdf.front().fraction) return cdf.front().error;
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    if (p <= cdf[i].fraction) {
      const double span = cdf[i].fraction - cdf[i - 1].fraction;
      if (span <= 0.0) return cdf[i].error;
      const double t = (p - cdf[i - 1].fraction) / span;
      return cdf[i - 1].error + t * (cdf[i].error - cdf[i - 1].error);
    }
  }
  return cdf.back().error;
}

double pearson_correlation(std::span<const double> a,
                           std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    fail(Errc::DimensionMismatch, "need two equal-length vectors, N >= 2");
  }
  const double n = static_cast<double>(a.size());
  const double mu_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mu_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double var_a = 0.0, var_b = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mu_a;
    const double db = b[i] - mu_b;
    var_a += da * da;
    var_b += db * db;
    cov += da * db;
  }
  // Sample standard deviations; with the 1/(N-1) normalization the
  // self-correlation is exactly 1.
  const double delta_a = std::sqrt(var_a / (n - 1.0));
  const double delta_b = std::sqrt(var_b / (n - 1.0));
  if (delta_a == 0.0 || delta_b == 0.0) {
    fail(Errc::ZeroVariance, "correlation of a constant vector");
  }
  return cov / ((n - 1.0) * delta_a * delta_b);
}

AmbiguityReport ambiguity_analysis(const FingerprintDatabase& db,
                                   const AmbiguityThreshold& threshold,
                                   FeatureKind feature) {
  if (db.grid_size <= 0.0 || !std::isfinite(db.grid_size)) {
    fail(Errc::MissingGridSize, "database carries no grid size");
  }
  if (db.size() < 2) fail(Errc::InvalidConfig, "need at least two RPs");

  const std::size_t m = db.size();

  // Z-score the feature vectors once; rho(i,j) is then a dot product.
  std::vector<std::vector<double>> z(m);
  std::vector<bool> usable(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    const std::vector<double>& f = db.points[i].fingerprint.features(feature);
    if (f.size() < 2) fail(Errc::InvalidConfig, "feature vector too short");
    const double n = static_cast<double>(f.size());
    const double mu = std::accumulate(f.begin(), f.end(), 0.0) / n;
    double var = 0.0;
    for (double v : f) var += (v - mu) * (v - mu);
    const double delta = std::sqrt(var / (n - 1.0));
    if (delta == 0.0) continue;  // constant fingerprint: no defined rho
    usable[i] = true;
    z[i].resize(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) z[i][j] = (f[j] - mu) / delta;
  }

  auto rho = [&](std::size_t i, std::size_t j) {
    double dot = 0.0;
    for (std::size_t t = 0; t < z[i].size(); ++t) dot += z[i][t] * z[j][t];
    return dot / (static_cast<double>(z[i].size()) - 1.0);
  };

  AmbiguityReport report;
  if (threshold.mode == AmbiguityThreshold::Mode::Fixed) {
    report.threshold = threshold.value;
  } else {
    // Average correlation between physical neighbours (within grid size).
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!usable[i]) continue;
      for (std::size_t j = i + 1; j < m; ++j) {
        if (!usable[j]) continue;
        if (distance(db.points[i].location, db.points[j].location) >
            db.grid_size) {
          continue;
        }
        sum += rho(i, j);
        ++count;
      }
    }
    if (count == 0) {
      fail(Errc::InvalidConfig,
           "no physical neighbour pairs within the grid size");
    }
    report.threshold = sum / count;
  }

  double incidence_sum = 0.0;
  std::size_t incidence_count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!usable[i]) continue;
    RpAmbiguity rp;
    rp.rp_index = i;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i || !usable[j]) continue;
      const double d = distance(db.points[i].location, db.points[j].location);
      if (d <= db.grid_size) continue;  // physical neighbour, not ambiguous
      const double r = rho(i, j);
      if (r > report.threshold) {
        rp.points.push_back({j, r, d});
      }
    }
    if (rp.points.empty()) continue;
    double sum = 0.0;
    double mx = 0.0;
    for (const AmbiguousPoint& ap : rp.points) {
      sum += ap.distance;
      mx = std::max(mx, ap.distance);
    }
    rp.mean_distance = sum / rp.points.size();
    rp.max_distance = mx;
    incidence_sum += sum;
    incidence_count += rp.points.size();
    report.overall_max_distance = std::max(report.overall_max_distance, mx);
    report.per_rp.push_back(std::move(rp));
  }
  report.ambiguous_rp_count = report.per_rp.size();
  report.overall_mean_distance =
      incidence_count ? incidence_sum / incidence_count : 0.0;
  return report;
}

}  // namespace srl
