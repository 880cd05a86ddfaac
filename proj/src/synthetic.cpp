#include "srl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "srl/errors.hpp"
#include "srl/rng.hpp"

namespace srl {

namespace {

void check_config(const SynthConfig& cfg) {
  if (cfg.width <= 0.0 || cfg.height <= 0.0) {
    fail(Errc::InvalidConfig, "floor dimensions must be positive");
  }
  if (cfg.grid_spacing <= 0.0) {
    fail(Errc::InvalidConfig, "grid spacing must be positive");
  }
  if (cfg.scans_per_rp < 1) fail(Errc::InvalidConfig, "need S1 >= 1");
  if (cfg.scans_per_step < 1) fail(Errc::InvalidConfig, "need S2 >= 1");
  if (cfg.trajectory_count < 0 || cfg.steps_per_trajectory < 2) {
    fail(Errc::InvalidConfig, "trajectories need at least 2 steps");
  }
  if (cfg.v_max <= 0.0 || cfg.dt <= 0.0) {
    fail(Errc::InvalidConfig, "v_max and dt must be positive");
  }
}

RssiScan sample_scan(const SynthConfig& cfg,
                     const std::vector<Point2>& aps, const Point2& pos,
                     Rng& rng) {
  RssiScan scan;
  scan.readings.reserve(aps.size());
  for (const Point2& ap : aps) {
    double rssi = path_loss_rssi(cfg, distance(pos, ap)) +
                  rng.normal(0.0, cfg.shadow_std_db);
    if (rssi > 0.0) rssi = 0.0;
    if (rssi < cfg.detection_floor_dbm) rssi = kMissingRssi;  // not detected
    scan.readings.push_back(rssi);
  }
  return scan;
}

std::size_t nearest_rp(const FingerprintDatabase& db, const Point2& pos) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < db.size(); ++i) {
    const double d = distance(db.points[i].location, pos);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::vector<Point2> default_ap_layout() {
  // Six APs scattered over the 21 x 16 m floor, five of them dual-band, so
  // every scan carries 11 channel readings. Positions are deliberately
  // asymmetric so mirror locations do not share distance sets.
  const std::vector<Point2> aps{{2.0, 2.0},  {18.5, 2.5}, {3.0, 13.5},
                                {19.0, 14.0}, {10.5, 8.0}, {7.5, 12.0}};
  std::vector<Point2> channels = aps;
  channels.insert(channels.end(), aps.begin(), aps.end() - 1);
  return channels;
}

double path_loss_rssi(const SynthConfig& cfg, double dist) {
  const double d = std::max(dist, 1.0);
  return cfg.tx_power_dbm - 10.0 * cfg.path_loss_exponent * std::log10(d);
}

SyntheticWorld generate_synthetic(const SynthConfig& cfg) {
  check_config(cfg);
  const std::vector<Point2> aps =
      cfg.ap_positions.empty() ? default_ap_layout() : cfg.ap_positions;

  SyntheticWorld world;
  FingerprintDatabase& db = world.database;
  db.grid_size = cfg.grid_spacing;
  for (std::size_t j = 0; j < aps.size(); ++j) {
    db.aps.push_back({static_cast<int>(j), "AP" + std::to_string(j)});
  }

  const MissingValuePolicy policy{MissingValuePolicy::Mode::SubstituteFloor,
                                  cfg.detection_floor_dbm};

  Rng rng(mix_seed(cfg.seed, 0));
  const int nx = static_cast<int>(std::floor(cfg.width / cfg.grid_spacing)) + 1;
  const int ny = static_cast<int>(std::floor(cfg.height / cfg.grid_spacing)) + 1;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      ReferencePoint rp;
      rp.location = {ix * cfg.grid_spacing, iy * cfg.grid_spacing};
      std::vector<RssiScan> scans;
      scans.reserve(cfg.scans_per_rp);
      for (int s = 0; s < cfg.scans_per_rp; ++s) {
        scans.push_back(sample_scan(cfg, aps, rp.location, rng));
      }
      rp.fingerprint = build_fingerprint(scans, policy);
      rp.scan_count = cfg.scans_per_rp;
      db.points.push_back(std::move(rp));
    }
  }

  // Plant the ambiguous twins: transplant the source's mean fingerprint
  // (and its derived rank/pair-diff features) onto the target.
  for (const TwinSpec& twin : cfg.twins) {
    const std::size_t src = nearest_rp(db, twin.source);
    const std::size_t dst = nearest_rp(db, twin.target);
    if (src == dst) fail(Errc::InvalidConfig, "twin maps an RP onto itself");
    Fingerprint& target = db.points[dst].fingerprint;
    target.mean = db.points[src].fingerprint.mean;
    rebuild_derived_features(target);
  }

  // Random waypoint walks; every displacement stays within v_max * dt.
  Rng traj_rng(mix_seed(cfg.seed, 1));
  const double margin = std::min({1.0, cfg.width / 4.0, cfg.height / 4.0});
  auto random_point = [&]() -> Point2 {
    return {traj_rng.uniform(margin, cfg.width - margin),
            traj_rng.uniform(margin, cfg.height - margin)};
  };
  for (int t = 0; t < cfg.trajectory_count; ++t) {
    Trajectory traj;
    traj.dt = cfg.dt;
    Point2 pos = random_point();
    Point2 waypoint = random_point();
    traj.initial_position = pos;
    for (int s = 0; s < cfg.steps_per_trajectory; ++s) {
      const double max_step = cfg.v_max * cfg.dt;
      if (traj_rng.uniform(0.0, 1.0) >= cfg.pause_probability) {
        double remaining = distance(pos, waypoint);
        while (remaining < max_step) {
          waypoint = random_point();
          remaining = distance(pos, waypoint);
        }
        const double step_len = traj_rng.uniform(0.4, 1.0) * max_step;
        pos = {pos.x + (waypoint.x - pos.x) / remaining * step_len,
               pos.y + (waypoint.y - pos.y) / remaining * step_len};
      }

      TrajectoryStep step;
      step.truth = pos;
      for (int s2 = 0; s2 < cfg.scans_per_step; ++s2) {
        step.scans.push_back(sample_scan(cfg, aps, pos, traj_rng));
      }
      traj.steps.push_back(std::move(step));
    }
    world.trajectories.push_back(std::move(traj));
  }

  return world;
}

}  // namespace srl
