#include <doctest.h>

#include <cmath>

#include "test_support.hpp"

using namespace srl;
using namespace srltest;
using doctest::Approx;

namespace {

FingerprintDatabase db_from_means(
    const std::vector<std::pair<Point2, std::vector<double>>>& rps) {
  FingerprintDatabase db;
  db.grid_size = 1.0;
  const std::size_t p = rps.front().second.size();
  for (std::size_t j = 0; j < p; ++j) {
    db.aps.push_back({static_cast<int>(j), "AP" + std::to_string(j)});
  }
  for (const auto& [loc, mean] : rps) {
    ReferencePoint rp;
    rp.location = loc;
    rp.fingerprint = fingerprint_from_mean(mean);
    rp.scan_count = 1;
    db.points.push_back(std::move(rp));
  }
  return db;
}

}  // namespace

TEST_CASE("locate_classic_knn") {
  SUBCASE("exact fingerprint match wins with k = 1") {
    Rng rng(1);
    FingerprintDatabase db = random_database(rng, 12, 4);
    LocalizerConfig cfg;
    cfg.algorithm = Algorithm::ClassicKnn;
    cfg.k = 1;
    const Estimate est = locate_classic_knn(db, db.points[7].fingerprint, cfg);
    CHECK(est.neighbors[0].rp_index == 7);
    CHECK(est.location == db.points[7].location);
  }
  SUBCASE("k = M averages every RP") {
    Rng rng(2);
    FingerprintDatabase db = random_database(rng, 9, 3);
    LocalizerConfig cfg;
    cfg.k = 9;
    const Estimate est = locate_classic_knn(db, random_query(rng, 3), cfg);
    Point2 centroid;
    for (const ReferencePoint& rp : db.points) {
      centroid.x += rp.location.x / 9.0;
      centroid.y += rp.location.y / 9.0;
    }
    CHECK(est.location.x == Approx(centroid.x));
    CHECK(est.location.y == Approx(centroid.y));
  }
  SUBCASE("equidistant square resolves to the grid center") {
    FingerprintDatabase db = db_from_means({{{0.0, 0.0}, {-48.0}},
                                            {{2.0, 0.0}, {-52.0}},
                                            {{0.0, 2.0}, {-52.0}},
                                            {{2.0, 2.0}, {-48.0}}});
    LocalizerConfig cfg;
    cfg.k = 4;
    const Estimate est =
        locate_classic_knn(db, fingerprint_from_mean({-50.0}), cfg);
    CHECK(est.location.x == Approx(1.0));
    CHECK(est.location.y == Approx(1.0));
  }
  SUBCASE("errors") {
    FingerprintDatabase empty;
    empty.aps.push_back({0, "AP0"});
    LocalizerConfig cfg;
    CHECK(thrown_code([&] {
            locate_classic_knn(empty, fingerprint_from_mean({-50.0}), cfg);
          }) == Errc::EmptyDatabase);

    Rng rng(3);
    FingerprintDatabase db = random_database(rng, 5, 3);
    CHECK(thrown_code([&] {
            locate_classic_knn(db, fingerprint_from_mean({-50.0}), cfg);
          }) == Errc::DimensionMismatch);
    cfg.k = 6;
    CHECK(thrown_code([&] {
            locate_classic_knn(db, random_query(rng, 3), cfg);
          }) == Errc::InvalidConfig);
  }
}

TEST_CASE("locate_wknn") {
  SUBCASE("a zero-distance neighbour takes over") {
    Rng rng(4);
    FingerprintDatabase db = random_database(rng, 10, 4);
    LocalizerConfig cfg;
    cfg.algorithm = Algorithm::Wknn;
    cfg.k = 3;
    const Estimate est = locate_wknn(db, db.points[2].fingerprint, cfg);
    CHECK(est.location == db.points[2].location);
  }
  SUBCASE("all zero-distance neighbours average unweighted") {
    FingerprintDatabase db = db_from_means({{{0.0, 0.0}, {-50.0, -60.0}},
                                            {{4.0, 2.0}, {-50.0, -60.0}},
                                            {{9.0, 9.0}, {-80.0, -90.0}}});
    LocalizerConfig cfg;
    cfg.k = 3;
    const Estimate est =
        locate_wknn(db, fingerprint_from_mean({-50.0, -60.0}), cfg);
    CHECK(est.location.x == Approx(2.0));
    CHECK(est.location.y == Approx(1.0));
  }
  SUBCASE("equal distances meet at the midpoint") {
    FingerprintDatabase db = db_from_means(
        {{{0.0, 0.0}, {-49.0}}, {{6.0, 2.0}, {-51.0}}});
    LocalizerConfig cfg;
    cfg.k = 2;
    const Estimate est = locate_wknn(db, fingerprint_from_mean({-50.0}), cfg);
    CHECK(est.location.x == Approx(3.0));
    CHECK(est.location.y == Approx(1.0));
  }
  SUBCASE("inverse-distance weights, distances 1 and 3") {
    FingerprintDatabase db = db_from_means(
        {{{0.0, 0.0}, {-51.0}}, {{4.0, 0.0}, {-53.0}}});
    LocalizerConfig cfg;
    cfg.k = 2;
    const Estimate est = locate_wknn(db, fingerprint_from_mean({-50.0}), cfg);
    CHECK(est.location.x == Approx(1.0));
    CHECK(est.location.y == Approx(0.0));
  }
}

TEST_CASE("locate_srl_knn") {
  SUBCASE("huge sigma degenerates to WKNN") {
    Rng rng(5);
    FingerprintDatabase db = random_database(rng, 40, 5);
    LocalizerConfig wknn_cfg;
    wknn_cfg.algorithm = Algorithm::Wknn;
    wknn_cfg.k = 3;
    LocalizerConfig srl_cfg = wknn_cfg;
    srl_cfg.algorithm = Algorithm::SrlKnn;
    srl_cfg.sigma = 1e9;
    for (int trial = 0; trial < 50; ++trial) {
      const Fingerprint query = random_query(rng, 5);
      const Point2 prev{rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)};
      const Estimate w = locate_wknn(db, query, wknn_cfg);
      const Estimate s = locate_srl_knn(db, query, prev, srl_cfg);
      CHECK(neighbor_indices(w) == neighbor_indices(s));
      CHECK(s.location.x == Approx(w.location.x).epsilon(1e-9));
      CHECK(s.location.y == Approx(w.location.y).epsilon(1e-9));
    }
  }
  SUBCASE("identical fingerprints: the penalty resolves the ambiguity") {
    FingerprintDatabase db = db_from_means(
        {{{10.0, 0.0}, {-50.0, -70.0}}, {{0.5, 0.0}, {-50.0, -70.0}}});
    LocalizerConfig cfg;
    cfg.algorithm = Algorithm::SrlKnn;
    cfg.k = 1;
    cfg.sigma = 2.0;
    // Query slightly off both fingerprints so the raw distance is nonzero.
    const Estimate est =
        locate_srl_knn(db, fingerprint_from_mean({-50.5, -70.5}), {0.0, 0.0}, cfg);
    CHECK(est.neighbors[0].rp_index == 1);
  }
  SUBCASE("neighbour set matches the exhaustive oracle") {
    Rng rng(6);
    FingerprintDatabase db = random_database(rng, 50, 6);
    LocalizerConfig cfg;
    cfg.algorithm = Algorithm::SrlKnn;
    cfg.k = 3;
    cfg.sigma = 2.0;
    for (int trial = 0; trial < 30; ++trial) {
      const Fingerprint query = random_query(rng, 6);
      const Point2 prev{rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)};
      const Estimate est = locate_srl_knn(db, query, prev, cfg);
      CHECK(neighbor_indices(est) ==
            oracle_neighbors(db, query, FeatureKind::Mean, prev, cfg.sigma,
                             cfg.k));
    }
  }
}

TEST_CASE("locate_srl_histogram") {
  SUBCASE("single-bin histograms match the mean-feature localizer") {
    Rng rng(7);
    FingerprintDatabase db = random_database(rng, 30, 4);
    LocalizerConfig cfg;
    cfg.k = 3;
    cfg.sigma = 2.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Fingerprint query = random_query(rng, 4);
      const Point2 prev{rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)};
      const Estimate mean_est = locate_srl_knn(db, query, prev, cfg);
      const Estimate hist_est = locate_srl_histogram(db, query, prev, cfg);
      CHECK(neighbor_indices(mean_est) == neighbor_indices(hist_est));
    }
  }
  SUBCASE("an exactly-matching histogram wins with k = 1") {
    Rng rng(8);
    FingerprintDatabase db = random_database(rng, 15, 4);
    LocalizerConfig cfg;
    cfg.k = 1;
    cfg.sigma = 5.0;
    const Fingerprint query = fingerprint_from_mean(db.points[9].fingerprint.mean);
    const Estimate est =
        locate_srl_histogram(db, query, db.points[9].location, cfg);
    CHECK(est.neighbors[0].rp_index == 9);
    CHECK(est.neighbors[0].scaled_distance == Approx(0.0));
  }
  SUBCASE("neighbour set matches the histogram oracle") {
    Rng rng(9);
    // Multi-scan fingerprints so histograms have real spread.
    FingerprintDatabase db;
    db.grid_size = 1.0;
    for (int j = 0; j < 4; ++j) db.aps.push_back({j, "AP" + std::to_string(j)});
    for (int i = 0; i < 25; ++i) {
      ReferencePoint rp;
      rp.location = {rng.uniform(0.0, 20.0), rng.uniform(0.0, 20.0)};
      std::vector<RssiScan> scans(10);
      std::vector<double> base(4);
      for (double& v : base) v = rng.uniform(-90.0, -35.0);
      for (RssiScan& scan : scans) {
        scan.readings.resize(4);
        for (int j = 0; j < 4; ++j) {
          scan.readings[j] = base[j] + rng.normal(0.0, 3.0);
        }
      }
      rp.fingerprint = build_fingerprint(scans, {});
      rp.scan_count = 10;
      db.points.push_back(std::move(rp));
    }
    LocalizerConfig cfg;
    cfg.k = 3;
    cfg.sigma = 2.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Fingerprint query = random_query(rng, 4);
      const Point2 prev{rng.uniform(0.0, 20.0), rng.uniform(0.0, 20.0)};
      const Estimate est = locate_srl_histogram(db, query, prev, cfg);
      CHECK(neighbor_indices(est) ==
            oracle_neighbors(db, query, FeatureKind::Mean, prev, cfg.sigma,
                             cfg.k, true));
    }
  }
}

TEST_CASE("locate_srl_combined") {
  SUBCASE("n = M reduces to the mean-feature SRL-KNN") {
    Rng rng(10);
    FingerprintDatabase db = random_database(rng, 20, 5);
    LocalizerConfig combined;
    combined.algorithm = Algorithm::SrlKnnCombined;
    combined.k = 3;
    combined.n = 20;
    combined.sigma = 2.0;
    combined.primary_feature = FeatureKind::Rank;
    LocalizerConfig plain;
    plain.k = 3;
    plain.sigma = 2.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Fingerprint query = random_query(rng, 5);
      const Point2 prev{rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)};
      CHECK(neighbor_indices(locate_srl_combined(db, query, prev, combined)) ==
            neighbor_indices(locate_srl_knn(db, query, prev, plain)));
    }
  }
  SUBCASE("rank-tied candidates: the smaller mean distance wins") {
    // Two candidates share the query's AP ranking; the mean refinement must
    // pick the one with the smaller Euclidean mean distance.
    FingerprintDatabase db = db_from_means({
        {{4.0, 5.0}, {-51.0, -61.0, -71.0}},  // L1: close in mean space
        {{6.0, 5.0}, {-48.0, -59.0, -68.0}},  // L2: same ranking, farther
        {{5.0, 7.0}, {-80.0, -60.0, -40.0}},  // reversed ranking
        {{5.0, 3.0}, {-60.0, -40.0, -80.0}},  // another distinct ranking
    });
    LocalizerConfig cfg;
    cfg.algorithm = Algorithm::SrlKnnCombined;
    cfg.k = 1;
    cfg.n = 2;
    cfg.sigma = 2.0;
    cfg.primary_feature = FeatureKind::Rank;
    const Fingerprint query = fingerprint_from_mean({-50.0, -60.0, -70.0});
    const Estimate est = locate_srl_combined(db, query, {5.0, 5.0}, cfg);
    CHECK(est.neighbors[0].rp_index == 0);
    CHECK(est.location == db.points[0].location);
  }
  SUBCASE("two-stage oracle equivalence") {
    Rng rng(11);
    FingerprintDatabase db = random_database(rng, 40, 5);
    LocalizerConfig cfg;
    cfg.algorithm = Algorithm::SrlKnnCombined;
    cfg.k = 3;
    cfg.n = 7;
    cfg.sigma = 2.0;
    for (FeatureKind feature : {FeatureKind::Rank, FeatureKind::PairDiff}) {
      cfg.primary_feature = feature;
      for (int trial = 0; trial < 20; ++trial) {
        const Fingerprint query = random_query(rng, 5);
        const Point2 prev{rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)};
        const Estimate est = locate_srl_combined(db, query, prev, cfg);
        CHECK(neighbor_indices(est) ==
              oracle_combined(db, query, feature, prev, cfg.sigma, cfg.n,
                              cfg.k));
      }
    }
  }
  SUBCASE("stage sizes are validated") {
    Rng rng(12);
    FingerprintDatabase db = random_database(rng, 10, 4);
    LocalizerConfig cfg;
    cfg.algorithm = Algorithm::SrlKnnCombined;
    cfg.k = 3;
    cfg.sigma = 2.0;
    cfg.n = 3;  // k < n violated
    CHECK(thrown_code([&] {
            locate_srl_combined(db, random_query(rng, 4), {0.0, 0.0}, cfg);
          }) == Errc::InvalidStageSizes);
    cfg.n = 11;  // n > M
    CHECK(thrown_code([&] {
            locate_srl_combined(db, random_query(rng, 4), {0.0, 0.0}, cfg);
          }) == Errc::InvalidStageSizes);
  }
}

TEST_CASE("estimates stay inside the neighbour bounding box") {
  Rng rng(13);
  FingerprintDatabase db = random_database(rng, 30, 5);
  std::vector<LocalizerConfig> configs(4);
  configs[0].algorithm = Algorithm::ClassicKnn;
  configs[1].algorithm = Algorithm::Wknn;
  configs[2].algorithm = Algorithm::SrlKnn;
  configs[3].algorithm = Algorithm::SrlKnnHistogram;
  for (LocalizerConfig& cfg : configs) {
    cfg.k = 4;
    cfg.sigma = 3.0;
  }
  for (int trial = 0; trial < 25; ++trial) {
    const Fingerprint query = random_query(rng, 5);
    const Point2 prev{rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)};
    for (const LocalizerConfig& cfg : configs) {
      const Estimate est = locate(db, query, prev, cfg);
      double lo_x = 1e30, hi_x = -1e30, lo_y = 1e30, hi_y = -1e30;
      for (const Neighbor& nb : est.neighbors) {
        const Point2& loc = db.points[nb.rp_index].location;
        lo_x = std::min(lo_x, loc.x);
        hi_x = std::max(hi_x, loc.x);
        lo_y = std::min(lo_y, loc.y);
        hi_y = std::max(hi_y, loc.y);
      }
      CHECK(est.location.x >= lo_x - 1e-9);
      CHECK(est.location.x <= hi_x + 1e-9);
      CHECK(est.location.y >= lo_y - 1e-9);
      CHECK(est.location.y <= hi_y + 1e-9);
    }
  }
}

TEST_CASE("rank and pair-diff features ignore a constant query offset") {
  Rng rng(14);
  FingerprintDatabase db = random_database(rng, 30, 5);
  LocalizerConfig cfg;
  cfg.algorithm = Algorithm::SrlKnn;
  cfg.k = 3;
  cfg.sigma = 2.0;
  for (FeatureKind feature : {FeatureKind::Rank, FeatureKind::PairDiff}) {
    cfg.primary_feature = feature;
    for (int trial = 0; trial < 15; ++trial) {
      std::vector<double> mean(5);
      for (double& v : mean) v = rng.uniform(-90.0, -35.0);
      std::vector<double> shifted = mean;
      const double c = rng.uniform(-15.0, 15.0);
      for (double& v : shifted) v += c;
      const Point2 prev{rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)};
      const Estimate a =
          locate_srl_knn(db, fingerprint_from_mean(mean), prev, cfg);
      const Estimate b =
          locate_srl_knn(db, fingerprint_from_mean(shifted), prev, cfg);
      CHECK(neighbor_indices(a) == neighbor_indices(b));
    }
  }
}

TEST_CASE("localization is deterministic") {
  Rng rng(15);
  FingerprintDatabase db = random_database(rng, 25, 4);
  const Fingerprint query = random_query(rng, 4);
  LocalizerConfig cfg;
  cfg.algorithm = Algorithm::SrlKnn;
  cfg.k = 3;
  cfg.sigma = 2.0;
  const Estimate a = locate(db, query, Point2{5.0, 5.0}, cfg);
  const Estimate b = locate(db, query, Point2{5.0, 5.0}, cfg);
  CHECK(a.location == b.location);
  CHECK(neighbor_indices(a) == neighbor_indices(b));
}

TEST_CASE("SRL variants demand a previous position") {
  Rng rng(16);
  FingerprintDatabase db = random_database(rng, 10, 4);
  LocalizerConfig cfg;
  cfg.algorithm = Algorithm::SrlKnn;
  CHECK(thrown_code([&] {
          locate(db, random_query(rng, 4), std::nullopt, cfg);
        }) == Errc::InvalidConfig);
}
