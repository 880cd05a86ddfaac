#include "srl/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srl/errors.hpp"

namespace srl {

int ApHistogram::total() const {
  int n = 0;
  for (const auto& [bin, count] : counts) n += count;
  return n;
}

int ApHistogram::min_bin() const { return counts.begin()->first; }

int ApHistogram::max_bin() const { return counts.rbegin()->first; }

double ApHistogram::probability(int rssi) const {
  auto it = counts.find(rssi);
  if (it == counts.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total());
}

double ApHistogram::mean() const {
  if (counts.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [bin, count] : counts) sum += double(bin) * count;
  return sum / total();
}

double ApHistogram::variance() const {
  if (counts.empty()) return 0.0;
  const double mu = mean();
  double sum = 0.0;
  for (const auto& [bin, count] : counts) {
    const double d = double(bin) - mu;
    sum += d * d * count;
  }
  return sum / total();
}

const std::vector<double>& Fingerprint::features(FeatureKind kind) const {
  switch (kind) {
    case FeatureKind::Mean: return mean;
    case FeatureKind::Rank: return ranks;
    case FeatureKind::PairDiff:
      if (pair_diffs.empty() && mean.size() > 1) {
        fail(Errc::InvalidConfig,
             "pair-diff features are not materialized for this AP count");
      }
      return pair_diffs;
  }
  return mean;
}

std::size_t pair_index(std::size_t j, std::size_t k, std::size_t ap_count) {
  // Row-major upper triangle: (0,1), (0,2), ..., (0,P-1), (1,2), ...
  return j * (2 * ap_count - j - 1) / 2 + (k - j - 1);
}

double pair_difference(const Fingerprint& fp, std::size_t j, std::size_t k) {
  const std::size_t p = fp.ap_count();
  if (j >= p || k >= p || j == k) fail(Errc::InvalidAp, "bad AP pair");
  if (fp.pair_diffs.empty()) {
    fail(Errc::InvalidConfig, "pair differences not materialized");
  }
  if (j < k) return fp.pair_diffs[pair_index(j, k, p)];
  return -fp.pair_diffs[pair_index(k, j, p)];
}

void rebuild_derived_features(Fingerprint& fp) {
  const std::size_t p = fp.mean.size();

  // Ranks by descending mean, ties to the lower AP index.
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fp.mean[a] > fp.mean[b];
  });
  fp.ranks.assign(p, 0.0);
  for (std::size_t pos = 0; pos < p; ++pos) {
    fp.ranks[order[pos]] = static_cast<double>(pos + 1);
  }

  fp.pair_diffs.clear();
  if (p <= kMaxPairDiffAps) {
    fp.pair_diffs.reserve(p * (p - 1) / 2);
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = j + 1; k < p; ++k) {
        fp.pair_diffs.push_back(fp.mean[j] - fp.mean[k]);
      }
    }
  }
}

Fingerprint build_fingerprint(std::span<const RssiScan> scans,
                              const MissingValuePolicy& policy) {
  if (scans.empty()) fail(Errc::EmptyScanSet, "no scans");
  const std::size_t p = scans[0].size();
  for (const RssiScan& scan : scans) {
    if (scan.size() != p) {
      fail(Errc::LengthMismatch, "scans disagree on AP count");
    }
  }

  Fingerprint fp;
  fp.mean.resize(p);
  fp.stddev.resize(p);
  fp.histogram.per_ap.resize(p);

  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (const RssiScan& scan : scans) {
      const double r = scan.readings[j];
      if (is_missing(r)) {
        if (policy.mode == MissingValuePolicy::Mode::SubstituteFloor) {
          sum += policy.floor_dbm;
          sum_sq += policy.floor_dbm * policy.floor_dbm;
          ++n;
        }
        continue;
      }
      sum += r;
      sum_sq += r * r;
      ++n;
      const int bin = static_cast<int>(std::llround(r));
      fp.histogram.per_ap[j].counts[bin] += 1;
    }
    if (n == 0) {
      // Every scan missed this AP and the policy excludes missing readings.
      fp.mean[j] = policy.floor_dbm;
      fp.stddev[j] = 0.0;
    } else {
      const double mu = sum / n;
      fp.mean[j] = mu;
      const double var = std::max(0.0, sum_sq / n - mu * mu);
      fp.stddev[j] = std::sqrt(var);
    }
  }

  rebuild_derived_features(fp);
  return fp;
}

Fingerprint query_fingerprint(std::span<const RssiScan> scans,
                              const MissingValuePolicy& policy) {
  return build_fingerprint(scans, policy);
}

double histogram_bin_probability(const RssiHistogram& hist, int ap, int rssi) {
  if (ap < 0 || static_cast<std::size_t>(ap) >= hist.per_ap.size()) {
    fail(Errc::InvalidAp, "AP index out of range");
  }
  return hist.per_ap[ap].probability(rssi);
}

}  // namespace srl
