#include "srl/serialization.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "srl/errors.hpp"

namespace srl {

namespace {

constexpr int kSchemaVersion = 1;
constexpr const char* kSchemaName = "srlknn-database";

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double_field(std::string_view field, int row, int col) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    fail(Errc::ParseError, "bad number at row " + std::to_string(row) +
                               ", column " + std::to_string(col));
  }
  return value;
}

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

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoError, "cannot open " + tmp + " for writing");
    out << content;
    if (!out) fail(Errc::IoError, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(Errc::IoError, "rename to " + path + " failed: " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string database_to_json(const FingerprintDatabase& db) {
  nlohmann::ordered_json doc;
  doc["schema"] = kSchemaName;
  doc["version"] = kSchemaVersion;
  doc["grid_size"] = db.grid_size;

  auto& aps = doc["aps"] = nlohmann::ordered_json::array();
  for (const ApId& ap : db.aps) {
    aps.push_back({{"index", ap.index}, {"label", ap.label}});
  }

  auto& points = doc["points"] = nlohmann::ordered_json::array();
  for (const ReferencePoint& rp : db.points) {
    nlohmann::ordered_json p;
    p["x"] = rp.location.x;
    p["y"] = rp.location.y;
    p["scan_count"] = rp.scan_count;
    p["mean"] = rp.fingerprint.mean;
    p["std"] = rp.fingerprint.stddev;
    auto& hist = p["histogram"] = nlohmann::ordered_json::array();
    for (const ApHistogram& ap_hist : rp.fingerprint.histogram.per_ap) {
      nlohmann::ordered_json bins = nlohmann::ordered_json::object();
      for (const auto& [bin, count] : ap_hist.counts) {
        bins[std::to_string(bin)] = count;
      }
      hist.push_back(std::move(bins));
    }
    points.push_back(std::move(p));
  }
  return doc.dump(2) + "\n";
}

FingerprintDatabase database_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::SchemaVersionMismatch,
         std::string("not a database document: ") + e.what());
  }
  if (!doc.is_object() || doc.value("schema", "") != kSchemaName ||
      doc.value("version", -1) != kSchemaVersion) {
    fail(Errc::SchemaVersionMismatch, "unsupported database schema/version");
  }

  FingerprintDatabase db;
  try {
    db.grid_size = doc.at("grid_size").get<double>();
    for (const auto& ap : doc.at("aps")) {
      db.aps.push_back(
          {ap.at("index").get<int>(), ap.at("label").get<std::string>()});
    }
    for (const auto& p : doc.at("points")) {
      ReferencePoint rp;
      rp.location = {p.at("x").get<double>(), p.at("y").get<double>()};
      rp.scan_count = p.at("scan_count").get<int>();
      rp.fingerprint.mean = p.at("mean").get<std::vector<double>>();
      rp.fingerprint.stddev = p.at("std").get<std::vector<double>>();
      if (rp.fingerprint.stddev.size() != rp.fingerprint.mean.size()) {
        fail(Errc::ParseError, "mean/std length mismatch");
      }
      for (const auto& bins : p.at("histogram")) {
        ApHistogram hist;
        for (const auto& [key, value] : bins.items()) {
          hist.counts[std::stoi(key)] = value.get<int>();
        }
        rp.fingerprint.histogram.per_ap.push_back(std::move(hist));
      }
      if (rp.fingerprint.histogram.per_ap.size() != rp.fingerprint.mean.size()) {
        fail(Errc::ParseError, "histogram/mean length mismatch");
      }
      rebuild_derived_features(rp.fingerprint);
      db.points.push_back(std::move(rp));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("malformed database document: ") + e.what());
  }
  for (const ReferencePoint& rp : db.points) {
    if (rp.fingerprint.ap_count() != db.ap_count()) {
      fail(Errc::ParseError, "point AP count disagrees with AP registry");
    }
  }
  return db;
}

void save_database(const FingerprintDatabase& db, const std::string& path) {
  write_file_atomic(path, database_to_json(db));
}

FingerprintDatabase load_database(const std::string& path) {
  return database_from_json(read_file(path));
}

void save_trajectory_csv(const Trajectory& traj, std::span<const ApId> aps,
                         const std::string& path) {
  std::ostringstream out;
  out << "step,x,y";
  for (const ApId& ap : aps) out << ',' << ap.label;
  out << '\n';
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const TrajectoryStep& step = traj.steps[t];
    for (const RssiScan& scan : step.scans) {
      out << t << ',' << format_double(step.truth.x) << ','
          << format_double(step.truth.y);
      for (double r : scan.readings) {
        out << ',';
        if (!is_missing(r)) out << format_double(r);
      }
      out << '\n';
    }
  }
  write_file_atomic(path, out.str());
}

Trajectory load_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) fail(Errc::ParseError, "empty trajectory file");
  strip_cr(line);
  std::vector<std::string_view> fields;
  split_csv(line, fields);
  if (fields.size() < 4 || fields[0] != "step" || fields[1] != "x" ||
      fields[2] != "y") {
    fail(Errc::ParseError, "trajectory header must be step,x,y,<APs...>");
  }
  const std::size_t ap_count = fields.size() - 3;

  Trajectory traj;
  int row = 1;
  long current_step = -1;
  while (std::getline(in, line)) {
    ++row;
    strip_cr(line);
    if (line.empty()) continue;
    split_csv(line, fields);
    if (fields.size() != ap_count + 3) {
      fail(Errc::ParseError,
           "row " + std::to_string(row) + " has wrong column count");
    }
    const long step_id =
        static_cast<long>(parse_double_field(fields[0], row, 1));
    RssiScan scan;
    scan.readings.reserve(ap_count);
    for (std::size_t j = 0; j < ap_count; ++j) {
      const std::string_view f = fields[3 + j];
      scan.readings.push_back(
          f.empty() ? kMissingRssi
                    : parse_double_field(f, row, static_cast<int>(4 + j)));
    }
    if (step_id != current_step) {
      if (step_id != current_step + 1) {
        fail(Errc::ParseError, "step indices must be consecutive (row " +
                                   std::to_string(row) + ")");
      }
      TrajectoryStep step;
      step.truth = {parse_double_field(fields[1], row, 2),
                    parse_double_field(fields[2], row, 3)};
      traj.steps.push_back(std::move(step));
      current_step = step_id;
    }
    traj.steps.back().scans.push_back(std::move(scan));
  }
  if (traj.steps.empty()) fail(Errc::ParseError, "trajectory has no rows");
  return traj;
}

}  // namespace srl
