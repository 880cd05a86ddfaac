#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srl/evaluation.hpp"
#include "srl/fingerprint.hpp"

namespace srl {

/// Row filter for the published UJIIndoorLoc CSVs.
struct UjiFilter {
  std::optional<int> building;
  std::optional<int> floor;
  std::vector<int> phone_ids;  // empty = all phones
};

struct UjiDataset {
  FingerprintDatabase database;       // from training rows
  std::vector<Trajectory> trajectories;  // from validation rows
};

/// The dataset encodes "AP not detected" as +100.
inline constexpr double kUjiNotDetected = 100.0;
inline constexpr double kUjiFloorDbm = -104.0;

/// Loads the published UJIIndoorLoc CSVs (header row, 529 columns).
/// Training rows are grouped by (longitude, latitude, floor, building) into
/// reference points; validation rows, per phone and ordered by timestamp,
/// become one trajectory per contiguous (building, floor) run. Coordinates
/// are the dataset's projected meters.
UjiDataset load_ujiindoorloc(const std::string& training_path,
                             const std::string& validation_path,
                             const UjiFilter& filter = {},
                             double missing_floor_dbm = kUjiFloorDbm);

}  // namespace srl
