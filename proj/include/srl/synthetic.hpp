#pragma once

#include <cstdint>
#include <vector>

#include "srl/evaluation.hpp"
#include "srl/fingerprint.hpp"
#include "srl/types.hpp"

namespace srl {

/// A deliberately planted ambiguity: the mean fingerprint (and the features
/// derived from it) of the RP nearest `source` is copied onto the RP
/// nearest `target`. The target keeps its own histogram and stddev, so
/// mean-based matching sees two identical locations while histogram
/// matching still sees the target's real signal.
struct TwinSpec {
  Point2 source;
  Point2 target;
};

/// Log-distance path-loss world: RSSI(d) = tx_power_dbm
/// - 10 * path_loss_exponent * log10(max(d, 1 m)) + N(0, shadow_std_db^2)
/// drawn independently per scan. Readings above 0 dBm clamp to 0; readings
/// below the detection floor are dropped (MISSING).
struct SynthConfig {
  double width = 21.0;   // meters
  double height = 16.0;  // meters
  std::vector<Point2> ap_positions;  // empty = default 6-AP layout
  double path_loss_exponent = 3.0;
  double tx_power_dbm = -40.0;  // received power at 1 m
  double shadow_std_db = 4.0;
  double detection_floor_dbm = -100.0;
  double grid_spacing = 1.0;  // meters between RPs
  int scans_per_rp = 100;     // S1
  std::uint64_t seed = 0;
  std::vector<TwinSpec> twins;

  // Trajectory generation (random waypoint walk with dwell periods; indoor
  // users spend most intervals stationary).
  int trajectory_count = 1;
  int steps_per_trajectory = 100;
  int scans_per_step = 1;  // S2
  double v_max = 2.0;      // m/s
  double dt = 1.0;         // s
  double pause_probability = 0.5;  // chance a step stays put

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

struct SyntheticWorld {
  FingerprintDatabase database;
  std::vector<Trajectory> trajectories;
};

/// Default channel layout: 6 physical APs, 5 of them dual-band, giving 11
/// RSSI channels per scan. Each entry is one channel; duplicated positions
/// share the physical AP but draw shadowing independently.
std::vector<Point2> default_ap_layout();

/// Noise-free model RSSI at distance d from an AP.
double path_loss_rssi(const SynthConfig& cfg, double dist);

/// Builds the gridded database and the test trajectories. Deterministic in
/// cfg.seed.
SyntheticWorld generate_synthetic(const SynthConfig& cfg);

}  // namespace srl
