#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace srl {

/// A reading for an AP that was not heard in a scan.
inline constexpr double kMissingRssi = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double rssi) { return std::isnan(rssi); }

/// Planar position in meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// One AP channel. Indices are dense 0..P-1 within a database; the label is
/// an opaque identifier (MAC/SSID-derived or a generated name).
struct ApId {
  int index = 0;
  std::string label;

  friend bool operator==(const ApId&, const ApId&) = default;
};

/// One instantaneous vector of RSSI readings across all P AP channels.
/// Unheard APs carry kMissingRssi.
struct RssiScan {
  std::vector<double> readings;

  std::size_t size() const { return readings.size(); }
};

/// How unheard APs enter the mean/Euclidean computation. They are always
/// excluded from histogram mass.
struct MissingValuePolicy {
  enum class Mode {
    SubstituteFloor,  // missing readings count as floor_dbm
    ExcludeMissing,   // statistics over heard readings only
  };

  Mode mode = Mode::SubstituteFloor;
  double floor_dbm = -100.0;

  friend bool operator==(const MissingValuePolicy&,
                         const MissingValuePolicy&) = default;
};

/// Which per-location feature vector feeds the Euclidean fingerprint
/// distance.
enum class FeatureKind {
  Mean,      // mean RSSI per AP
  Rank,      // AP rank positions, 1 = strongest
  PairDiff,  // mean RSSI differences over AP pairs (j < k)
};

const char* feature_kind_name(FeatureKind kind);

inline const char* feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Mean: return "mean";
    case FeatureKind::Rank: return "rank";
    case FeatureKind::PairDiff: return "pairdiff";
  }
  return "?";
}

}  // namespace srl
