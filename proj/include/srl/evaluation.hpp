#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srl/fingerprint.hpp"
#include "srl/localizer.hpp"
#include "srl/rng.hpp"
#include "srl/types.hpp"

namespace srl {

struct TrajectoryStep {
  Point2 truth;
  std::vector<RssiScan> scans;  // S2 test scans taken at this step
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double dt = 1.0;  // seconds between steps
  std::optional<Point2> initial_position;  // known start, when available
};

/// Where the penalty anchor for step t comes from.
enum class PriorMode {
  EstimatedPrior,  // previous estimate (closed loop, the default)
  TruthPrior,      // previous ground-truth position
  PerturbedTruth,  // previous ground truth plus Gaussian error
};

/// Gaussian error injected into the prior: per-axis standard deviations
/// whose squared sum is E^2.
struct PerturbationSpec {
  double error_magnitude = 0.0;  // E, meters
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  std::uint64_t seed = 0;

  /// The symmetric split sigma_x = sigma_y = E / sqrt(2).
  static PerturbationSpec isotropic(double e, std::uint64_t seed);
};

struct ReplayOptions {
  PriorMode prior_mode = PriorMode::EstimatedPrior;
  /// Use the first step's ground truth as the step-0 anchor when the
  /// trajectory carries no explicit initial position. Without either, the
  /// first step falls back to plain WKNN.
  bool assume_known_start = true;
  PerturbationSpec perturbation{};  // PerturbedTruth only
  /// Optional stationary-alignment mode: steps whose query fingerprint
  /// barely moved from the previous one are located with plain WKNN.
  bool stationary_alignment = false;
  double stationary_threshold_db = 2.0;
};

struct StepResult {
  Point2 estimate;
  Point2 truth;
  double error = 0.0;  // meters
  std::optional<Point2> prior;  // anchor used, when the algorithm has one
};

struct CdfPoint {
  double error = 0.0;
  double fraction = 0.0;
};

struct TrajectoryResult {
  std::vector<StepResult> steps;
  double mean_error = 0.0;
  double std_error = 0.0;  // population formula
  double p80 = 0.0;
  double max_error = 0.0;
  std::vector<CdfPoint> cdf;
};

/// Replays a trajectory in order, feeding each step the prior selected by
/// the options. Deterministic for a fixed perturbation seed.
TrajectoryResult replay_trajectory(const FingerprintDatabase& db,
                                   const Trajectory& traj,
                                   const LocalizerConfig& cfg,
                                   const ReplayOptions& options = {});

/// Pools several per-trajectory results into one (steps concatenated,
/// statistics recomputed).
TrajectoryResult merge_results(std::span<const TrajectoryResult> results);

/// Empirical CDF over the per-step errors at the standard plotting
/// positions i/(n-1), so it spans 0..1 and inverts to the same percentile
/// convention used below.
std::vector<CdfPoint> error_cdf(const TrajectoryResult& result);

/// Percentile by linear interpolation between order statistics
/// (h = (n-1) p).
double percentile(std::vector<double> values, double p);

/// Reads a percentile back off a stored CDF by inverse interpolation.
double percentile_from_cdf(std::span<const CdfPoint> cdf, double p);

/// Pearson correlation coefficient between two fingerprint feature
/// vectors, using sample standard deviations.
double pearson_correlation(std::span<const double> a,
                           std::span<const double> b);

struct AmbiguousPoint {
  std::size_t other_rp = 0;
  double correlation = 0.0;
  double distance = 0.0;  // physical separation, meters
};

struct RpAmbiguity {
  std::size_t rp_index = 0;
  std::vector<AmbiguousPoint> points;
  double max_distance = 0.0;   // d_a^max for this RP
  double mean_distance = 0.0;  // mean d_a for this RP
};

struct AmbiguityReport {
  double threshold = 0.0;  // correlation threshold actually used
  std::vector<RpAmbiguity> per_rp;  // one entry per RP with >= 1 ambiguous point
  std::size_t ambiguous_rp_count = 0;
  double overall_mean_distance = 0.0;  // mean over all ambiguous incidences
  double overall_max_distance = 0.0;
};

struct AmbiguityThreshold {
  enum class Mode { Auto, Fixed };
  Mode mode = Mode::Auto;
  double value = 0.85;  // Fixed mode only

  static AmbiguityThreshold automatic() { return {Mode::Auto, 0.0}; }
  static AmbiguityThreshold fixed(double rho) { return {Mode::Fixed, rho}; }
};

/// Finds, for every RP, the physically distant locations (separation
/// greater than the grid size) whose fingerprints correlate above the
/// threshold. Auto mode sets the threshold to the average correlation
/// between physical neighbours (separation within the grid size).
AmbiguityReport ambiguity_analysis(const FingerprintDatabase& db,
                                   const AmbiguityThreshold& threshold,
                                   FeatureKind feature = FeatureKind::Mean);

/// Adds zero-mean Gaussian noise to a ground-truth prior.
Point2 perturb_prior(const Point2& truth, const PerturbationSpec& spec,
                     Rng& rng);

}  // namespace srl
