#pragma once

#include <iosfwd>
#include <string>

#include "srl/evaluation.hpp"
#include "srl/fingerprint.hpp"

namespace srl {

/// Versioned JSON database document. Histograms are stored as sparse
/// {rssi: count} maps so the training scan count stays recoverable; ranks
/// and pair differences are derived from the stored means on load.
void save_database(const FingerprintDatabase& db, const std::string& path);
FingerprintDatabase load_database(const std::string& path);

std::string database_to_json(const FingerprintDatabase& db);
FingerprintDatabase database_from_json(const std::string& text);

/// Trajectory CSV: header `step,x,y,<ap labels...>`, one row per scan
/// (steps with several scans repeat their step index), missing readings as
/// empty cells.
void save_trajectory_csv(const Trajectory& traj,
                         std::span<const ApId> aps, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path);

/// Writes content to path via a temporary file + rename so readers never
/// observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace srl
