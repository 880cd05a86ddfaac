#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "srl/serialization.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SRLKNN_CLI_PATH;

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "srlknn_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& log_name = "log.txt") {
  const std::string log = (work_dir() / log_name).string();
  const int status =
      std::system((kCli + " " + args + " > " + log + " 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) { return srl::read_file(p.string()); }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

const char* kUjiHeader =
    "WAP001,WAP002,WAP003,LONGITUDE,LATITUDE,FLOOR,BUILDINGID,SPACEID,"
    "RELATIVEPOSITION,USERID,PHONEID,TIMESTAMP\n";

}  // namespace

TEST_CASE("build synthetic is reproducible byte for byte") {
  const fs::path a = work_dir() / "synth_a";
  const fs::path b = work_dir() / "synth_b";
  const std::string args =
      "build synthetic --seed 7 --steps 25 --width 8 --height 6 --s1 15";
  REQUIRE(run(args + " --out-dir " + a.string()) == 0);
  REQUIRE(run(args + " --out-dir " + b.string()) == 0);
  CHECK(slurp(a / "database.json") == slurp(b / "database.json"));
  CHECK(slurp(a / "trajectory_0.csv") == slurp(b / "trajectory_0.csv"));
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
}

TEST_CASE("evaluate: huge sigma collapses SRL onto WKNN") {
  const fs::path world = work_dir() / "world";
  REQUIRE(run("build synthetic --seed 3 --steps 30 --out-dir " +
              world.string()) == 0);
  const fs::path out = work_dir() / "eval_degenerate";
  REQUIRE(run("evaluate --db " + (world / "database.json").string() +
              " --traj " + (world / "trajectory_0.csv").string() +
              " --algo wknn --algo srl-mean --k 3 --sigma 1e9 --out-dir " +
              out.string()) == 0);
  const auto rows = lines_of(slurp(out / "comparison.csv"));
  REQUIRE(rows.size() == 3);
  // Identical error columns for both algorithms.
  CHECK(rows[1].substr(rows[1].find(',')) == rows[2].substr(rows[2].find(',')));
}

TEST_CASE("evaluate: rank feature drives the classic baseline") {
  const fs::path world = work_dir() / "world";
  const fs::path out = work_dir() / "eval_rank";
  REQUIRE(run("evaluate --db " + (world / "database.json").string() +
              " --traj " + (world / "trajectory_0.csv").string() +
              " --algo classic --feature rank --k 3 --out-dir " +
              out.string()) == 0);
  CHECK(fs::exists(out / "classic_summary.json"));
}

TEST_CASE("missing input file exits 2 and writes nothing") {
  const fs::path out = work_dir() / "missing_input";
  CHECK(run("evaluate --db /nonexistent/db.json --traj also_missing.csv "
            "--algo classic --out-dir " +
            out.string()) == 2);
  CHECK(!fs::exists(out));
}

TEST_CASE("config errors exit 2") {
  const fs::path world = work_dir() / "world";
  CHECK(run("evaluate --db " + (world / "database.json").string() +
            " --traj " + (world / "trajectory_0.csv").string() +
            " --algo nonsense --out-dir " +
            (work_dir() / "x1").string()) == 2);
  CHECK(run("perturb --db " + (world / "database.json").string() + " --traj " +
            (world / "trajectory_0.csv").string() +
            " --e-list 1,-2 --out-dir " + (work_dir() / "x2").string()) == 2);
}

TEST_CASE("perturb: E = 0 reproduces the truth-prior baseline") {
  const fs::path world = work_dir() / "world";
  const std::string db = (world / "database.json").string();
  const std::string traj = (world / "trajectory_0.csv").string();

  const fs::path base = work_dir() / "truth_baseline";
  REQUIRE(run("evaluate --db " + db + " --traj " + traj +
              " --algo srl-hist --k 1 --sigma 2 --prior truth --out-dir " +
              base.string()) == 0);
  const fs::path pert = work_dir() / "perturb_run";
  REQUIRE(run("perturb --db " + db + " --traj " + traj +
              " --algo srl-hist --k 1 --sigma 2 --e-list 0,1 --seeds 3 "
              "--out-dir " +
              pert.string()) == 0);

  // comparison.csv row: algorithm,mean,std,p80,max
  const auto base_rows = lines_of(slurp(base / "comparison.csv"));
  const std::string base_stats = base_rows[1].substr(base_rows[1].find(',') + 1);
  // perturbation.csv row: e,seed,mean,std,p80,max
  const auto pert_rows = lines_of(slurp(pert / "perturbation.csv"));
  CHECK(pert_rows[0] == "e_m,seed,mean_error_m,std_error_m,p80_m,max_error_m");
  int zero_rows = 0;
  for (std::size_t i = 1; i < pert_rows.size(); ++i) {
    if (pert_rows[i].rfind("0.000000,", 0) != 0) continue;
    ++zero_rows;
    std::string stats = pert_rows[i];
    stats.erase(0, stats.find(',') + 1);  // drop E
    stats.erase(0, stats.find(',') + 1);  // drop seed
    CHECK(stats == base_stats);
  }
  CHECK(zero_rows == 3);

  // The summary carries the across-seed variance column.
  const auto summary_rows = lines_of(slurp(pert / "perturbation_summary.csv"));
  CHECK(summary_rows[0] ==
        "e_m,seeds,mean_error_avg_m,mean_error_var,p80_avg_m,max_error_avg_m");
}

TEST_CASE("ambiguity: planted twin appears with the auto threshold header") {
  const fs::path world = work_dir() / "twin_world";
  REQUIRE(run("build synthetic --seed 5 --steps 10 --twin 2,2:14,2 "
              "--out-dir " +
              world.string()) == 0);
  const fs::path out = work_dir() / "ambiguity";
  REQUIRE(run("ambiguity --db " + (world / "database.json").string() +
              " --out-dir " + out.string()) == 0);
  const std::string report = slurp(out / "ambiguity.csv");
  CHECK(report.find("# threshold=") != std::string::npos);
  CHECK(report.find("mode=auto") != std::string::npos);
  // The planted source (2,2) must be listed with d_a >= 12.
  bool found = false;
  for (const std::string& line : lines_of(report)) {
    if (line.rfind("#", 0) == 0 || line.rfind("rp_index", 0) == 0) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() == 6 && std::stod(fields[1]) == 2.0 &&
        std::stod(fields[2]) == 2.0 && std::stod(fields[5]) >= 12.0) {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("ambiguity without a grid size exits 2 unless overridden") {
  // A raw-scans database carries no grid size.
  const fs::path scans_world = work_dir() / "world";
  const fs::path rawdb = work_dir() / "rawdb";
  REQUIRE(run("build raw-scans --scans " +
              (scans_world / "trajectory_0.csv").string() + " --out-dir " +
              rawdb.string()) == 0);
  CHECK(run("ambiguity --db " + (rawdb / "database.json").string() +
            " --out-dir " + (work_dir() / "amb_fail").string()) == 2);
  CHECK(run("ambiguity --db " + (rawdb / "database.json").string() +
            " --grid-size 1 --out-dir " +
            (work_dir() / "amb_ok").string()) == 0);
}

TEST_CASE("build uji: distinct-location count matches the group-by oracle") {
  const fs::path dir = work_dir();
  {
    std::ofstream train(dir / "uji_train.csv");
    train << kUjiHeader;
    train << "-50,100,-70,-7500.0,4864900.0,1,0,101,1,1,13,1000\n";
    train << "-52,100,-72,-7500.0,4864900.0,1,0,101,1,1,13,1001\n";
    train << "-55,100,-75,-7490.0,4864910.0,1,0,102,1,1,13,1002\n";
    train << "-60,-65,100,-7300.0,4864950.0,2,1,205,1,2,14,1003\n";
    std::ofstream valid(dir / "uji_valid.csv");
    valid << kUjiHeader;
    valid << "-55,100,-75,-7499.0,4864901.0,1,0,101,1,1,13,2000\n";
    valid << "-56,100,-74,-7498.0,4864902.0,1,0,101,1,1,13,2001\n";
  }
  const fs::path out = work_dir() / "uji_build";
  REQUIRE(run("build uji --training " + (dir / "uji_train.csv").string() +
              " --validation " + (dir / "uji_valid.csv").string() +
              " --building 0 --out-dir " + out.string(),
              "uji_log.txt") == 0);
  // Two distinct building-0 training locations in the fixture.
  const std::string log = slurp(work_dir() / "uji_log.txt");
  CHECK(log.find("M=2 RPs") != std::string::npos);
  CHECK(fs::exists(out / "database.json"));

  // An impossible filter is a data error (exit 3), with no partial output.
  CHECK(run("build uji --training " + (dir / "uji_train.csv").string() +
            " --validation " + (dir / "uji_valid.csv").string() +
            " --building 7 --out-dir " + (work_dir() / "uji_none").string()) ==
        3);
  CHECK(!fs::exists(work_dir() / "uji_none"));
}

TEST_CASE("locate prints an estimate with neighbours") {
  const fs::path world = work_dir() / "world";
  REQUIRE(run("locate --db " + (world / "database.json").string() +
              " --traj " + (world / "trajectory_0.csv").string() +
              " --step 0 --algo srl-mean --prior-pos 4,3 --k 3",
              "locate_log.txt") == 0);
  const std::string log = slurp(work_dir() / "locate_log.txt");
  CHECK(log.find("estimate:") != std::string::npos);
  CHECK(log.find("neighbor rp=") != std::string::npos);
}

TEST_CASE("evaluate reruns are byte-identical") {
  const fs::path world = work_dir() / "world";
  const std::string args = "evaluate --db " +
                           (world / "database.json").string() + " --traj " +
                           (world / "trajectory_0.csv").string() +
                           " --algo srl-combined --algo srl-rank --k 2 --n 6 "
                           "--sigma 2 --prior perturbed:1.5 --seed 11";
  const fs::path r1 = work_dir() / "rerun_1";
  const fs::path r2 = work_dir() / "rerun_2";
  REQUIRE(run(args + " --out-dir " + r1.string()) == 0);
  REQUIRE(run(args + " --out-dir " + r2.string()) == 0);
  for (const auto& entry : fs::directory_iterator(r1)) {
    CHECK(slurp(entry.path()) == slurp(r2 / entry.path().filename()));
  }
}
