#include "srl/uji.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>

#include "srl/errors.hpp"

namespace srl {

namespace {

struct UjiColumns {
  std::vector<std::size_t> waps;  // in header order
  std::size_t longitude = 0;
  std::size_t latitude = 0;
  std::size_t floor = 0;
  std::size_t building = 0;
  std::size_t user = 0;
  std::size_t phone = 0;
  std::size_t timestamp = 0;
};

struct UjiRow {
  RssiScan scan;
  double longitude = 0.0;
  double latitude = 0.0;
  int floor = 0;
  int building = 0;
  int user = 0;
  int phone = 0;
  long timestamp = 0;
};

void split_csv(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_number(std::string_view field, int row, std::size_t col) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    fail(Errc::ParseError, "bad number at row " + std::to_string(row) +
                               ", column " + std::to_string(col + 1));
  }
  return value;
}

UjiColumns resolve_columns(std::string_view header, int& column_count) {
  std::vector<std::string_view> names;
  split_csv(header, names);
  column_count = static_cast<int>(names.size());

  UjiColumns cols;
  bool have_lon = false, have_lat = false, have_floor = false,
       have_building = false, have_user = false, have_phone = false,
       have_ts = false;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string_view n = names[i];
    if (n.rfind("WAP", 0) == 0) {
      cols.waps.push_back(i);
    } else if (n == "LONGITUDE") {
      cols.longitude = i;
      have_lon = true;
    } else if (n == "LATITUDE") {
      cols.latitude = i;
      have_lat = true;
    } else if (n == "FLOOR") {
      cols.floor = i;
      have_floor = true;
    } else if (n == "BUILDINGID") {
      cols.building = i;
      have_building = true;
    } else if (n == "USERID") {
      cols.user = i;
      have_user = true;
    } else if (n == "PHONEID") {
      cols.phone = i;
      have_phone = true;
    } else if (n == "TIMESTAMP") {
      cols.timestamp = i;
      have_ts = true;
    }
    // SPACEID / RELATIVEPOSITION are present in the published schema but
    // unused here.
  }
  if (cols.waps.empty() || !have_lon || !have_lat || !have_floor ||
      !have_building || !have_user || !have_phone || !have_ts) {
    fail(Errc::ParseError, "header is not the published UJIIndoorLoc schema");
  }
  return cols;
}

std::vector<UjiRow> load_rows(const std::string& path, double floor_dbm,
                              std::size_t* ap_count_out) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) fail(Errc::ParseError, "empty file " + path);
  strip_cr(line);
  int column_count = 0;
  const UjiColumns cols = resolve_columns(line, column_count);
  if (ap_count_out) *ap_count_out = cols.waps.size();

  std::vector<UjiRow> rows;
  std::vector<std::string_view> fields;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    strip_cr(line);
    if (line.empty()) continue;
    split_csv(line, fields);
    if (fields.size() != static_cast<std::size_t>(column_count)) {
      fail(Errc::ParseError,
           "row " + std::to_string(row_no) + " has wrong column count");
    }
    UjiRow row;
    row.scan.readings.reserve(cols.waps.size());
    for (std::size_t c : cols.waps) {
      const double v = parse_number(fields[c], row_no, c);
      if (v == kUjiNotDetected) {
        row.scan.readings.push_back(kMissingRssi);
      } else {
        row.scan.readings.push_back(std::clamp(v, floor_dbm, 0.0));
      }
    }
    row.longitude = parse_number(fields[cols.longitude], row_no, cols.longitude);
    row.latitude = parse_number(fields[cols.latitude], row_no, cols.latitude);
    row.floor = static_cast<int>(parse_number(fields[cols.floor], row_no, cols.floor));
    row.building =
        static_cast<int>(parse_number(fields[cols.building], row_no, cols.building));
    row.user = static_cast<int>(parse_number(fields[cols.user], row_no, cols.user));
    row.phone = static_cast<int>(parse_number(fields[cols.phone], row_no, cols.phone));
    row.timestamp =
        static_cast<long>(parse_number(fields[cols.timestamp], row_no, cols.timestamp));
    rows.push_back(std::move(row));
  }
  return rows;
}

bool keep_location(const UjiRow& row, const UjiFilter& filter) {
  if (filter.building && row.building != *filter.building) return false;
  if (filter.floor && row.floor != *filter.floor) return false;
  return true;
}

}  // namespace

UjiDataset load_ujiindoorloc(const std::string& training_path,
                             const std::string& validation_path,
                             const UjiFilter& filter,
                             double missing_floor_dbm) {
  std::size_t train_aps = 0;
  std::size_t valid_aps = 0;
  std::vector<UjiRow> training =
      load_rows(training_path, missing_floor_dbm, &train_aps);
  std::vector<UjiRow> validation =
      load_rows(validation_path, missing_floor_dbm, &valid_aps);
  if (train_aps != valid_aps) {
    fail(Errc::ParseError, "training/validation AP counts disagree");
  }

  UjiDataset out;
  for (std::size_t j = 0; j < train_aps; ++j) {
    char label[16];
    std::snprintf(label, sizeof(label), "WAP%03zu", j + 1);
    out.database.aps.push_back({static_cast<int>(j), label});
  }
  out.database.grid_size = 0.0;  // the survey points are not gridded

  // Training rows at the same surveyed position form one reference point.
  const MissingValuePolicy policy{MissingValuePolicy::Mode::SubstituteFloor,
                                  missing_floor_dbm};
  std::map<std::tuple<double, double, int, int>, std::vector<RssiScan>> groups;
  for (UjiRow& row : training) {
    if (!keep_location(row, filter)) continue;
    groups[{row.longitude, row.latitude, row.floor, row.building}].push_back(
        std::move(row.scan));
  }
  if (groups.empty()) {
    fail(Errc::EmptyAfterFilter, "no training rows match the filter");
  }
  for (auto& [key, scans] : groups) {
    ReferencePoint rp;
    rp.location = {std::get<0>(key), std::get<1>(key)};
    rp.scan_count = static_cast<int>(scans.size());
    rp.fingerprint = build_fingerprint(scans, policy);
    out.database.points.push_back(std::move(rp));
  }

  // Validation rows of the selected phones, in timestamp order, become one
  // trajectory per contiguous (building, floor) run.
  std::erase_if(validation, [&](const UjiRow& row) {
    if (!keep_location(row, filter)) return true;
    if (filter.phone_ids.empty()) return false;
    return std::find(filter.phone_ids.begin(), filter.phone_ids.end(),
                     row.phone) == filter.phone_ids.end();
  });
  if (validation.empty()) {
    fail(Errc::EmptyAfterFilter, "no validation rows match the filter");
  }
  std::stable_sort(validation.begin(), validation.end(),
                   [](const UjiRow& a, const UjiRow& b) {
                     if (a.phone != b.phone) return a.phone < b.phone;
                     return a.timestamp < b.timestamp;
                   });

  Trajectory current;
  int run_phone = -1, run_building = -1, run_floor = -1;
  auto flush = [&]() {
    if (current.steps.size() >= 2) {
      out.trajectories.push_back(std::move(current));
    }
    current = Trajectory{};
  };
  for (UjiRow& row : validation) {
    if (row.phone != run_phone || row.building != run_building ||
        row.floor != run_floor) {
      flush();
      run_phone = row.phone;
      run_building = row.building;
      run_floor = row.floor;
    }
    TrajectoryStep step;
    step.truth = {row.longitude, row.latitude};
    step.scans.push_back(std::move(row.scan));
    current.steps.push_back(std::move(step));
  }
  flush();
  if (out.trajectories.empty()) {
    fail(Errc::EmptyAfterFilter, "no trajectory run has at least two steps");
  }
  return out;
}

}  // namespace srl
