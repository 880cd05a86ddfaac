// srlknn — WiFi-fingerprinting localization toolkit.
//
// Subcommands: build (synthetic | uji | raw-scans), evaluate, perturb,
// ambiguity, locate. Every command writes a manifest next to its outputs;
// rerunning with the same manifest inputs reproduces the files byte for
// byte. Exit codes: 0 success, 2 usage/config error, 3 data error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srl/errors.hpp"
#include "srl/evaluation.hpp"
#include "srl/localizer.hpp"
#include "srl/reports.hpp"
#include "srl/serialization.hpp"
#include "srl/synthetic.hpp"
#include "srl/uji.hpp"

namespace {

using nlohmann::ordered_json;

constexpr const char* kToolVersion = "0.1.0";

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("SRL_LOG");
    return env ? std::atoi(env) : 0;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_level() >= 1) std::cerr << "[srlknn] " << message << "\n";
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

// ---- shared option bundles ------------------------------------------------

struct AlgoSpec {
  srl::Algorithm algorithm;
  srl::FeatureKind feature;
};

AlgoSpec parse_algo(const std::string& name, srl::FeatureKind baseline_feature) {
  if (name == "classic") return {srl::Algorithm::ClassicKnn, baseline_feature};
  if (name == "wknn") return {srl::Algorithm::Wknn, baseline_feature};
  if (name == "srl-mean") return {srl::Algorithm::SrlKnn, srl::FeatureKind::Mean};
  if (name == "srl-rank") return {srl::Algorithm::SrlKnn, srl::FeatureKind::Rank};
  if (name == "srl-hist")
    return {srl::Algorithm::SrlKnnHistogram, srl::FeatureKind::Mean};
  if (name == "srl-combined")
    return {srl::Algorithm::SrlKnnCombined,
            baseline_feature == srl::FeatureKind::PairDiff
                ? srl::FeatureKind::PairDiff
                : srl::FeatureKind::Rank};
  srl::fail(srl::Errc::InvalidConfig, "unknown algorithm '" + name + "'");
}

srl::FeatureKind parse_feature(const std::string& name) {
  if (name == "mean") return srl::FeatureKind::Mean;
  if (name == "rank") return srl::FeatureKind::Rank;
  if (name == "pairdiff") return srl::FeatureKind::PairDiff;
  srl::fail(srl::Errc::InvalidConfig, "unknown feature '" + name + "'");
}

struct PriorSpec {
  srl::PriorMode mode = srl::PriorMode::EstimatedPrior;
  double perturb_e = 0.0;
};

PriorSpec parse_prior(const std::string& text) {
  PriorSpec spec;
  if (text == "estimated") {
    spec.mode = srl::PriorMode::EstimatedPrior;
  } else if (text == "truth") {
    spec.mode = srl::PriorMode::TruthPrior;
  } else if (text.rfind("perturbed:", 0) == 0) {
    spec.mode = srl::PriorMode::PerturbedTruth;
    try {
      spec.perturb_e = std::stod(text.substr(10));
    } catch (const std::exception&) {
      srl::fail(srl::Errc::InvalidConfig, "bad perturbed prior '" + text + "'");
    }
    if (spec.perturb_e < 0.0) {
      srl::fail(srl::Errc::InvalidConfig, "perturbation E must be >= 0");
    }
  } else {
    srl::fail(srl::Errc::InvalidConfig,
              "prior must be estimated | truth | perturbed:E");
  }
  return spec;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      srl::fail(srl::Errc::InvalidConfig,
                std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) {
    srl::fail(srl::Errc::InvalidConfig, std::string(what) + " is empty");
  }
  return out;
}

// ---- manifest ---------------------------------------------------------------

class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed) {
    doc_["tool"] = "srlknn";
    doc_["version"] = kToolVersion;
    doc_["command"] = std::move(command);
    doc_["seed"] = seed;
    doc_["config"] = ordered_json::object();
    doc_["inputs"] = ordered_json::object();
    doc_["outputs"] = ordered_json::array();
  }

  ordered_json& config() { return doc_["config"]; }

  void add_input(const std::string& name, const std::string& path,
                 const std::string& content) {
    doc_["inputs"][name] = {{"path", path}, {"fnv1a64", hash_hex(content)}};
  }

  void add_output(const std::string& name) { doc_["outputs"].push_back(name); }

  void write(const std::filesystem::path& out_dir) const {
    srl::write_file_atomic((out_dir / "manifest.json").string(),
                           doc_.dump(2) + "\n");
  }

 private:
  ordered_json doc_;
};

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) srl::fail(srl::Errc::IoError, "cannot create " + out_dir);
  return dir;
}

srl::FingerprintDatabase load_db_checked(const std::string& path,
                                         Manifest& manifest) {
  const std::string content = srl::read_file(path);
  manifest.add_input("db", path, content);
  return srl::database_from_json(content);
}

std::vector<srl::Trajectory> load_trajectories(
    const std::vector<std::string>& paths, const srl::FingerprintDatabase& db,
    Manifest& manifest) {
  if (paths.empty()) {
    srl::fail(srl::Errc::InvalidConfig, "at least one --traj is required");
  }
  std::vector<srl::Trajectory> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    manifest.add_input("traj" + std::to_string(i), paths[i],
                       srl::read_file(paths[i]));
    srl::Trajectory traj = srl::load_trajectory_csv(paths[i]);
    for (const srl::TrajectoryStep& step : traj.steps) {
      if (step.scans.empty() || step.scans[0].size() != db.ap_count()) {
        srl::fail(srl::Errc::ConfigMismatch,
                  paths[i] + " AP count disagrees with the database");
      }
    }
    out.push_back(std::move(traj));
  }
  return out;
}

// ---- build ------------------------------------------------------------------

struct BuildSynthArgs {
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  double width = 21.0, height = 16.0, grid = 1.0;
  double shadow = 4.0, gamma = 3.0, tx_power = -40.0, floor = -100.0;
  double v_max = 2.0;
  double pause = 0.5;
  int s1 = 100, s2 = 1, trajectories = 1, steps = 100;
  std::vector<std::string> twin_specs;
};

srl::TwinSpec parse_twin(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    srl::fail(srl::Errc::InvalidConfig, "twin must be 'sx,sy:tx,ty'");
  }
  const auto src = parse_double_list(text.substr(0, colon), "twin source");
  const auto dst = parse_double_list(text.substr(colon + 1), "twin target");
  if (src.size() != 2 || dst.size() != 2) {
    srl::fail(srl::Errc::InvalidConfig, "twin must be 'sx,sy:tx,ty'");
  }
  return {{src[0], src[1]}, {dst[0], dst[1]}};
}

int run_build_synthetic(const BuildSynthArgs& args) {
  srl::SynthConfig cfg;
  cfg.width = args.width;
  cfg.height = args.height;
  cfg.grid_spacing = args.grid;
  cfg.shadow_std_db = args.shadow;
  cfg.path_loss_exponent = args.gamma;
  cfg.tx_power_dbm = args.tx_power;
  cfg.detection_floor_dbm = args.floor;
  cfg.scans_per_rp = args.s1;
  cfg.scans_per_step = args.s2;
  cfg.trajectory_count = args.trajectories;
  cfg.steps_per_trajectory = args.steps;
  cfg.v_max = args.v_max;
  cfg.pause_probability = args.pause;
  cfg.seed = args.seed;
  for (const std::string& spec : args.twin_specs) {
    cfg.twins.push_back(parse_twin(spec));
  }

  const srl::SyntheticWorld world = srl::generate_synthetic(cfg);
  const auto dir = prepare_out_dir(args.out_dir);

  Manifest manifest("build synthetic", args.seed);
  auto& config = manifest.config();
  config["width"] = cfg.width;
  config["height"] = cfg.height;
  config["grid_spacing"] = cfg.grid_spacing;
  config["shadow_std_db"] = cfg.shadow_std_db;
  config["path_loss_exponent"] = cfg.path_loss_exponent;
  config["tx_power_dbm"] = cfg.tx_power_dbm;
  config["detection_floor_dbm"] = cfg.detection_floor_dbm;
  config["scans_per_rp"] = cfg.scans_per_rp;
  config["scans_per_step"] = cfg.scans_per_step;
  config["trajectory_count"] = cfg.trajectory_count;
  config["steps_per_trajectory"] = cfg.steps_per_trajectory;
  config["v_max"] = cfg.v_max;
  config["pause_probability"] = cfg.pause_probability;
  config["twins"] = args.twin_specs;

  srl::save_database(world.database, (dir / "database.json").string());
  manifest.add_output("database.json");
  for (std::size_t i = 0; i < world.trajectories.size(); ++i) {
    const std::string name = "trajectory_" + std::to_string(i) + ".csv";
    srl::save_trajectory_csv(world.trajectories[i], world.database.aps,
                             (dir / name).string());
    manifest.add_output(name);
  }
  manifest.write(dir);

  std::printf("database: M=%zu RPs, P=%zu APs, grid=%.2f m, %zu trajectories\n",
              world.database.size(), world.database.ap_count(),
              world.database.grid_size, world.trajectories.size());
  return 0;
}

int run_build_uji(const std::string& training, const std::string& validation,
                  const std::string& out_dir, std::optional<int> building,
                  std::optional<int> floor, const std::string& phone_ids,
                  double missing_floor) {
  srl::UjiFilter filter;
  filter.building = building;
  filter.floor = floor;
  if (!phone_ids.empty()) {
    for (double id : parse_double_list(phone_ids, "phone id")) {
      filter.phone_ids.push_back(static_cast<int>(id));
    }
  }

  Manifest manifest("build uji", 0);
  manifest.add_input("training", training, srl::read_file(training));
  manifest.add_input("validation", validation, srl::read_file(validation));
  auto& config = manifest.config();
  config["building"] = building ? ordered_json(*building) : ordered_json();
  config["floor"] = floor ? ordered_json(*floor) : ordered_json();
  config["phone_ids"] = filter.phone_ids;
  config["missing_floor_dbm"] = missing_floor;

  const srl::UjiDataset data =
      srl::load_ujiindoorloc(training, validation, filter, missing_floor);
  const auto dir = prepare_out_dir(out_dir);
  srl::save_database(data.database, (dir / "database.json").string());
  manifest.add_output("database.json");
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const std::string name = "trajectory_" + std::to_string(i) + ".csv";
    srl::save_trajectory_csv(data.trajectories[i], data.database.aps,
                             (dir / name).string());
    manifest.add_output(name);
  }
  manifest.write(dir);

  std::printf("database: M=%zu RPs, P=%zu APs, %zu trajectories\n",
              data.database.size(), data.database.ap_count(),
              data.trajectories.size());
  return 0;
}

int run_build_raw(const std::string& scans_path, double grid_size,
                  const std::string& out_dir, double missing_floor) {
  Manifest manifest("build raw-scans", 0);
  manifest.add_input("scans", scans_path, srl::read_file(scans_path));
  manifest.config()["grid_size"] = grid_size;
  manifest.config()["missing_floor_dbm"] = missing_floor;

  // Each step of the scan file is one reference point; its rows are the
  // scans taken there.
  const srl::Trajectory raw = srl::load_trajectory_csv(scans_path);
  srl::FingerprintDatabase db;
  db.grid_size = grid_size;
  const std::size_t p = raw.steps.front().scans.front().size();
  for (std::size_t j = 0; j < p; ++j) {
    db.aps.push_back({static_cast<int>(j), "AP" + std::to_string(j)});
  }
  const srl::MissingValuePolicy policy{
      srl::MissingValuePolicy::Mode::SubstituteFloor, missing_floor};
  for (const srl::TrajectoryStep& step : raw.steps) {
    srl::ReferencePoint rp;
    rp.location = step.truth;
    rp.fingerprint = srl::build_fingerprint(step.scans, policy);
    rp.scan_count = static_cast<int>(step.scans.size());
    db.points.push_back(std::move(rp));
  }

  const auto dir = prepare_out_dir(out_dir);
  srl::save_database(db, (dir / "database.json").string());
  manifest.add_output("database.json");
  manifest.write(dir);
  std::printf("database: M=%zu RPs, P=%zu APs, grid=%.2f m\n", db.size(),
              db.ap_count(), db.grid_size);
  return 0;
}

// ---- evaluate -----------------------------------------------------------------

struct EvalArgs {
  std::string db_path;
  std::vector<std::string> traj_paths;
  std::vector<std::string> algos;
  std::string out_dir = "out";
  std::string prior = "estimated";
  std::string feature = "mean";
  int k = 3;
  int n = 7;
  double sigma = 2.0;
  double missing_floor = -100.0;
  std::uint64_t seed = 0;
  bool no_known_start = false;
  bool no_stage1_penalty = false;
};

srl::LocalizerConfig make_config(const EvalArgs& args, const AlgoSpec& spec) {
  srl::LocalizerConfig cfg;
  cfg.algorithm = spec.algorithm;
  cfg.k = args.k;
  cfg.n = args.n;
  cfg.sigma = args.sigma;
  cfg.primary_feature = spec.feature;
  cfg.stage1_penalty = !args.no_stage1_penalty;
  cfg.missing_policy = {srl::MissingValuePolicy::Mode::SubstituteFloor,
                        args.missing_floor};
  return cfg;
}

int run_evaluate(const EvalArgs& args) {
  if (args.algos.empty()) {
    srl::fail(srl::Errc::InvalidConfig, "at least one --algo is required");
  }
  const PriorSpec prior = parse_prior(args.prior);
  const srl::FeatureKind baseline_feature = parse_feature(args.feature);

  Manifest manifest("evaluate", args.seed);
  const srl::FingerprintDatabase db = load_db_checked(args.db_path, manifest);
  const std::vector<srl::Trajectory> trajectories =
      load_trajectories(args.traj_paths, db, manifest);

  auto& config = manifest.config();
  config["algorithms"] = args.algos;
  config["k"] = args.k;
  config["n"] = args.n;
  config["sigma"] = args.sigma;
  config["prior"] = args.prior;
  config["feature"] = args.feature;
  config["missing_floor_dbm"] = args.missing_floor;
  config["assume_known_start"] = !args.no_known_start;
  config["stage1_penalty"] = !args.no_stage1_penalty;

  struct AlgoOutputs {
    std::string name;
    std::vector<srl::TrajectoryResult> per_traj;
    srl::TrajectoryResult pooled;
  };
  std::vector<AlgoOutputs> outputs;
  for (const std::string& name : args.algos) {
    const AlgoSpec spec = parse_algo(name, baseline_feature);
    const srl::LocalizerConfig cfg = make_config(args, spec);
    AlgoOutputs out;
    out.name = name;
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
      srl::ReplayOptions options;
      options.prior_mode = prior.mode;
      options.assume_known_start = !args.no_known_start;
      options.perturbation = srl::PerturbationSpec::isotropic(
          prior.perturb_e, srl::mix_seed(args.seed, i));
      out.per_traj.push_back(
          srl::replay_trajectory(db, trajectories[i], cfg, options));
      log_info(name + " traj " + std::to_string(i) + ": mean error " +
               std::to_string(out.per_traj.back().mean_error) + " m");
    }
    out.pooled = srl::merge_results(out.per_traj);
    outputs.push_back(std::move(out));
  }

  const auto dir = prepare_out_dir(args.out_dir);
  std::vector<srl::ComparisonRow> rows;
  for (const AlgoOutputs& out : outputs) {
    for (std::size_t i = 0; i < out.per_traj.size(); ++i) {
      const std::string name =
          out.name + "_traj" + std::to_string(i) + "_steps.csv";
      srl::write_file_atomic((dir / name).string(),
                             srl::step_csv(out.per_traj[i]));
      manifest.add_output(name);
    }
    const std::string summary = out.name + "_summary.json";
    srl::write_file_atomic((dir / summary).string(),
                           srl::summary_json(out.pooled));
    manifest.add_output(summary);
    rows.push_back({out.name, out.pooled.mean_error, out.pooled.std_error,
                    out.pooled.p80, out.pooled.max_error});
  }
  srl::write_file_atomic((dir / "comparison.csv").string(),
                         srl::comparison_csv(rows));
  manifest.add_output("comparison.csv");
  const std::string table = srl::comparison_text(rows);
  srl::write_file_atomic((dir / "comparison.txt").string(), table);
  manifest.add_output("comparison.txt");
  manifest.write(dir);

  std::fputs(table.c_str(), stdout);
  return 0;
}

// ---- perturb ------------------------------------------------------------------

int run_perturb(const EvalArgs& args, const std::string& e_list,
                const std::string& e_sigmas, int seed_count,
                const std::string& algo_name) {
  if (seed_count < 1) {
    srl::fail(srl::Errc::InvalidConfig, "--seeds must be >= 1");
  }
  std::vector<double> e_values;
  if (!e_list.empty() && !e_sigmas.empty()) {
    srl::fail(srl::Errc::InvalidConfig, "give --e-list or --e-sigmas, not both");
  }
  if (!e_list.empty()) {
    e_values = parse_double_list(e_list, "E");
  } else if (!e_sigmas.empty()) {
    for (double mult : parse_double_list(e_sigmas, "E multiple")) {
      e_values.push_back(mult * args.sigma);
    }
  } else {
    e_values = {0.0, 0.5 * args.sigma, args.sigma, 1.5 * args.sigma,
                2.0 * args.sigma};
  }
  for (double e : e_values) {
    if (e < 0.0) srl::fail(srl::Errc::InvalidConfig, "E must be >= 0");
  }

  Manifest manifest("perturb", args.seed);
  const srl::FingerprintDatabase db = load_db_checked(args.db_path, manifest);
  const std::vector<srl::Trajectory> trajectories =
      load_trajectories(args.traj_paths, db, manifest);

  auto& config = manifest.config();
  config["algorithm"] = algo_name;
  config["k"] = args.k;
  config["sigma"] = args.sigma;
  config["e_values_m"] = e_values;
  config["seeds"] = seed_count;
  config["missing_floor_dbm"] = args.missing_floor;

  const AlgoSpec spec = parse_algo(algo_name, srl::FeatureKind::Mean);
  const srl::LocalizerConfig cfg = make_config(args, spec);

  std::ostringstream per_seed;
  per_seed << "e_m,seed,mean_error_m,std_error_m,p80_m,max_error_m\n";
  std::ostringstream summary;
  summary << "e_m,seeds,mean_error_avg_m,mean_error_var,p80_avg_m,"
             "max_error_avg_m\n";
  std::ostringstream cdf_out;
  cdf_out << "e_m,error_m,fraction\n";

  char line[256];
  for (double e : e_values) {
    std::vector<double> means, p80s, maxes;
    std::vector<srl::TrajectoryResult> pooled_runs;
    for (int s = 0; s < seed_count; ++s) {
      srl::ReplayOptions options;
      options.prior_mode = srl::PriorMode::PerturbedTruth;
      options.perturbation =
          srl::PerturbationSpec::isotropic(e, srl::mix_seed(args.seed, s));
      std::vector<srl::TrajectoryResult> per_traj;
      for (const srl::Trajectory& traj : trajectories) {
        per_traj.push_back(srl::replay_trajectory(db, traj, cfg, options));
      }
      const srl::TrajectoryResult pooled = srl::merge_results(per_traj);
      std::snprintf(line, sizeof(line), "%.6f,%d,%.6f,%.6f,%.6f,%.6f\n", e, s,
                    pooled.mean_error, pooled.std_error, pooled.p80,
                    pooled.max_error);
      per_seed << line;
      means.push_back(pooled.mean_error);
      p80s.push_back(pooled.p80);
      maxes.push_back(pooled.max_error);
      pooled_runs.push_back(pooled);
    }
    double mean_avg = 0.0, p80_avg = 0.0, max_avg = 0.0;
    for (int s = 0; s < seed_count; ++s) {
      mean_avg += means[s];
      p80_avg += p80s[s];
      max_avg += maxes[s];
    }
    mean_avg /= seed_count;
    p80_avg /= seed_count;
    max_avg /= seed_count;
    double mean_var = 0.0;
    for (double m : means) mean_var += (m - mean_avg) * (m - mean_avg);
    mean_var /= seed_count;
    std::snprintf(line, sizeof(line), "%.6f,%d,%.6f,%.6f,%.6f,%.6f\n", e,
                  seed_count, mean_avg, mean_var, p80_avg, max_avg);
    summary << line;

    const srl::TrajectoryResult all = srl::merge_results(pooled_runs);
    for (const srl::CdfPoint& p : all.cdf) {
      std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f\n", e, p.error,
                    p.fraction);
      cdf_out << line;
    }
  }

  const auto dir = prepare_out_dir(args.out_dir);
  srl::write_file_atomic((dir / "perturbation.csv").string(), per_seed.str());
  manifest.add_output("perturbation.csv");
  srl::write_file_atomic((dir / "perturbation_summary.csv").string(),
                         summary.str());
  manifest.add_output("perturbation_summary.csv");
  srl::write_file_atomic((dir / "perturbation_cdf.csv").string(),
                         cdf_out.str());
  manifest.add_output("perturbation_cdf.csv");
  manifest.write(dir);

  std::fputs(summary.str().c_str(), stdout);
  return 0;
}

// ---- ambiguity ------------------------------------------------------------------

int run_ambiguity(const std::string& db_path, const std::string& threshold,
                  double grid_size_flag, const std::string& out_dir) {
  Manifest manifest("ambiguity", 0);
  srl::FingerprintDatabase db = load_db_checked(db_path, manifest);
  if (grid_size_flag > 0.0) db.grid_size = grid_size_flag;

  srl::AmbiguityThreshold mode = srl::AmbiguityThreshold::automatic();
  if (threshold != "auto") {
    try {
      mode = srl::AmbiguityThreshold::fixed(std::stod(threshold));
    } catch (const std::exception&) {
      srl::fail(srl::Errc::InvalidConfig,
                "--threshold must be 'auto' or a number");
    }
  }
  manifest.config()["threshold"] = threshold;
  manifest.config()["grid_size"] = db.grid_size;

  const srl::AmbiguityReport report = srl::ambiguity_analysis(db, mode);

  std::ostringstream out;
  char line[256];
  out << "# srlknn ambiguity report\n";
  std::snprintf(line, sizeof(line), "# threshold=%.6f mode=%s\n",
                report.threshold, threshold == "auto" ? "auto" : "fixed");
  out << line;
  std::snprintf(line, sizeof(line),
                "# ambiguous_rps=%zu overall_mean_d_a_m=%.6f "
                "overall_max_d_a_m=%.6f\n",
                report.ambiguous_rp_count, report.overall_mean_distance,
                report.overall_max_distance);
  out << line;
  out << "rp_index,x,y,ambiguous_points,mean_d_a_m,max_d_a_m\n";
  for (const srl::RpAmbiguity& rp : report.per_rp) {
    const srl::Point2& loc = db.points[rp.rp_index].location;
    std::snprintf(line, sizeof(line), "%zu,%.6f,%.6f,%zu,%.6f,%.6f\n",
                  rp.rp_index, loc.x, loc.y, rp.points.size(),
                  rp.mean_distance, rp.max_distance);
    out << line;
  }

  const auto dir = prepare_out_dir(out_dir);
  srl::write_file_atomic((dir / "ambiguity.csv").string(), out.str());
  manifest.add_output("ambiguity.csv");
  manifest.write(dir);

  std::printf("threshold %.4f: %zu ambiguous RPs, mean d_a %.2f m, max %.2f m\n",
              report.threshold, report.ambiguous_rp_count,
              report.overall_mean_distance, report.overall_max_distance);
  return 0;
}

// ---- locate ---------------------------------------------------------------------

int run_locate(const EvalArgs& args, int step_index,
               const std::string& prior_pos, const std::string& algo_name) {
  Manifest manifest("locate", args.seed);
  const srl::FingerprintDatabase db = load_db_checked(args.db_path, manifest);
  const std::vector<srl::Trajectory> trajectories =
      load_trajectories(args.traj_paths, db, manifest);
  const srl::Trajectory& traj = trajectories.front();
  if (step_index < 0 ||
      static_cast<std::size_t>(step_index) >= traj.steps.size()) {
    srl::fail(srl::Errc::InvalidConfig, "--step out of range");
  }

  const AlgoSpec spec = parse_algo(algo_name, parse_feature(args.feature));
  const srl::LocalizerConfig cfg = make_config(args, spec);

  std::optional<srl::Point2> prev;
  if (!prior_pos.empty()) {
    const auto xy = parse_double_list(prior_pos, "prior position");
    if (xy.size() != 2) {
      srl::fail(srl::Errc::InvalidConfig, "--prior-pos must be 'x,y'");
    }
    prev = srl::Point2{xy[0], xy[1]};
  }

  const srl::Fingerprint query =
      srl::query_fingerprint(traj.steps[step_index].scans, cfg.missing_policy);
  const srl::Estimate est = srl::locate(db, query, prev, cfg);
  std::printf("estimate: %.3f %.3f\n", est.location.x, est.location.y);
  for (const srl::Neighbor& nb : est.neighbors) {
    const srl::Point2& loc = db.points[nb.rp_index].location;
    std::printf("neighbor rp=%zu at (%.2f, %.2f) scaled_distance=%.6g\n",
                nb.rp_index, loc.x, loc.y, nb.scaled_distance);
  }
  return 0;
}

int exit_code_for(srl::Errc code) {
  switch (code) {
    case srl::Errc::InvalidConfig:
    case srl::Errc::InvalidStageSizes:
    case srl::Errc::ConfigMismatch:
    case srl::Errc::MissingGridSize:
    case srl::Errc::DimensionMismatch:
    case srl::Errc::IoError:  // a path that cannot be opened is a usage problem
      return 2;
    default:
      return 3;  // data errors: parse failures, empty filters, bad schemas
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soft range limited KNN indoor-localization toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "build a fingerprint database");
  build->require_subcommand(1);

  BuildSynthArgs synth;
  auto* build_synth =
      build->add_subcommand("synthetic", "log-distance path-loss world");
  build_synth->add_option("--out-dir", synth.out_dir);
  build_synth->add_option("--seed", synth.seed);
  build_synth->add_option("--width", synth.width);
  build_synth->add_option("--height", synth.height);
  build_synth->add_option("--grid", synth.grid);
  build_synth->add_option("--shadow", synth.shadow);
  build_synth->add_option("--gamma", synth.gamma);
  build_synth->add_option("--tx-power", synth.tx_power);
  build_synth->add_option("--missing-floor", synth.floor);
  build_synth->add_option("--v-max", synth.v_max);
  build_synth->add_option("--pause", synth.pause, "per-step dwell probability");
  build_synth->add_option("--s1", synth.s1);
  build_synth->add_option("--s2", synth.s2);
  build_synth->add_option("--trajectories", synth.trajectories);
  build_synth->add_option("--steps", synth.steps);
  build_synth->add_option("--twin", synth.twin_specs,
                          "planted twin 'sx,sy:tx,ty' (repeatable)");

  std::string uji_training, uji_validation, uji_out = "out", uji_phones;
  int uji_building = -1, uji_floor = -1;
  double uji_missing_floor = srl::kUjiFloorDbm;
  auto* build_uji = build->add_subcommand("uji", "UJIIndoorLoc CSVs");
  build_uji->add_option("--training", uji_training)->required();
  build_uji->add_option("--validation", uji_validation)->required();
  build_uji->add_option("--out-dir", uji_out);
  build_uji->add_option("--building", uji_building);
  build_uji->add_option("--floor", uji_floor);
  build_uji->add_option("--phone-ids", uji_phones, "comma-separated");
  build_uji->add_option("--missing-floor", uji_missing_floor);

  std::string raw_scans, raw_out = "out";
  double raw_grid = 0.0, raw_floor = -100.0;
  auto* build_raw =
      build->add_subcommand("raw-scans", "trajectory-format scan CSV");
  build_raw->add_option("--scans", raw_scans)->required();
  build_raw->add_option("--grid-size", raw_grid);
  build_raw->add_option("--out-dir", raw_out);
  build_raw->add_option("--missing-floor", raw_floor);

  // evaluate
  EvalArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "replay trajectories");
  evaluate->add_option("--db", eval.db_path)->required();
  evaluate->add_option("--traj", eval.traj_paths)->required();
  evaluate->add_option("--algo", eval.algos,
                       "classic|wknn|srl-mean|srl-rank|srl-hist|srl-combined");
  evaluate->add_option("--k", eval.k);
  evaluate->add_option("--n", eval.n);
  evaluate->add_option("--sigma", eval.sigma);
  evaluate->add_option("--prior", eval.prior, "estimated|truth|perturbed:E");
  evaluate->add_option("--feature", eval.feature, "mean|rank|pairdiff");
  evaluate->add_option("--missing-floor", eval.missing_floor);
  evaluate->add_option("--seed", eval.seed);
  evaluate->add_option("--out-dir", eval.out_dir);
  evaluate->add_flag("--no-known-start", eval.no_known_start);
  evaluate->add_flag("--no-stage1-penalty", eval.no_stage1_penalty);

  // perturb
  EvalArgs pert;
  std::string pert_e_list, pert_e_sigmas, pert_algo = "srl-hist";
  int pert_seeds = 10;
  auto* perturb = app.add_subcommand("perturb", "erroneous-history study");
  perturb->add_option("--db", pert.db_path)->required();
  perturb->add_option("--traj", pert.traj_paths)->required();
  perturb->add_option("--algo", pert_algo);
  perturb->add_option("--k", pert.k);
  perturb->add_option("--sigma", pert.sigma);
  perturb->add_option("--e-list", pert_e_list, "absolute E values in meters");
  perturb->add_option("--e-sigmas", pert_e_sigmas, "E as multiples of sigma");
  perturb->add_option("--seeds", pert_seeds);
  perturb->add_option("--seed", pert.seed);
  perturb->add_option("--missing-floor", pert.missing_floor);
  perturb->add_option("--out-dir", pert.out_dir);

  // ambiguity
  std::string amb_db, amb_threshold = "auto", amb_out = "out";
  double amb_grid = 0.0;
  auto* ambiguity = app.add_subcommand("ambiguity", "correlation analysis");
  ambiguity->add_option("--db", amb_db)->required();
  ambiguity->add_option("--threshold", amb_threshold, "'auto' or a value");
  ambiguity->add_option("--grid-size", amb_grid,
                        "override when the database has none");
  ambiguity->add_option("--out-dir", amb_out);

  // locate
  EvalArgs loc;
  std::string loc_prior_pos, loc_algo = "srl-mean";
  int loc_step = 0;
  auto* locate_cmd = app.add_subcommand("locate", "single localization");
  locate_cmd->add_option("--db", loc.db_path)->required();
  locate_cmd->add_option("--traj", loc.traj_paths)->required();
  locate_cmd->add_option("--step", loc_step);
  locate_cmd->add_option("--algo", loc_algo);
  locate_cmd->add_option("--k", loc.k);
  locate_cmd->add_option("--n", loc.n);
  locate_cmd->add_option("--sigma", loc.sigma);
  locate_cmd->add_option("--feature", loc.feature);
  locate_cmd->add_option("--missing-floor", loc.missing_floor);
  locate_cmd->add_option("--prior-pos", loc_prior_pos, "'x,y'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build_synth->parsed()) return run_build_synthetic(synth);
    if (build_uji->parsed()) {
      return run_build_uji(
          uji_training, uji_validation, uji_out,
          uji_building >= 0 ? std::optional<int>(uji_building) : std::nullopt,
          uji_floor >= 0 ? std::optional<int>(uji_floor) : std::nullopt,
          uji_phones, uji_missing_floor);
    }
    if (build_raw->parsed()) {
      return run_build_raw(raw_scans, raw_grid, raw_out, raw_floor);
    }
    if (evaluate->parsed()) return run_evaluate(eval);
    if (perturb->parsed()) {
      return run_perturb(pert, pert_e_list, pert_e_sigmas, pert_seeds,
                         pert_algo);
    }
    if (ambiguity->parsed()) {
      return run_ambiguity(amb_db, amb_threshold, amb_grid, amb_out);
    }
    if (locate_cmd->parsed()) {
      return run_locate(loc, loc_step, loc_prior_pos, loc_algo);
    }
  } catch (const srl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
