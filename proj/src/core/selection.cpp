/* Copyright 2026 The SmartHand Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "smarthand/core/selection.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "smarthand/core/calibration.hpp"
#include "smarthand/error.hpp"
#include "smarthand/rng.hpp"

namespace smarthand::core {
namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return sum;
}

std::size_t nearest(const std::vector<std::vector<double>>& centroids, const std::vector<double>& p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(centroids[c], p);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<std::vector<double>> seed_plus_plus(const std::vector<std::vector<double>>& points, std::size_t k,
                                                Rng& rng) {
  std::vector<std::vector<double>> centroids;
  centroids.push_back(points[rng.below(points.size())]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centroids[0]);

  while (centroids.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double run = 0.0;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        run += d2[i];
        if (run > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      // All points coincide with chosen centroids.
      pick = rng.below(points.size());
    }
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i)
      d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations) {
  if (points.empty() || k == 0) throw Error(ErrorKind::EmptyInput, "k-means needs points and k >= 1");
  if (k > points.size()) throw NotEnoughValidFrames(points.size(), k);

  Rng rng(seed);
  KMeansResult result;
  result.centroids = seed_plus_plus(points, k, rng);
  result.assignment.assign(points.size(), k);
  const std::size_t dims = points.front().size();

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t c = nearest(result.centroids, points[i]);
      if (c != result.assignment[i]) {
        result.assignment[i] = c;
        changed = true;
      }
    }
    result.iterations = iter + 1;
    if (!changed) break;

    std::vector<std::vector<double>> sums(k, std::vector<double>(dims, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto& s = sums[result.assignment[i]];
      for (std::size_t d = 0; d < dims; ++d) s[d] += points[i][d];
      ++counts[result.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Empty cluster: restart it at the point farthest from its centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
          const double d = squared_distance(points[i], result.centroids[result.assignment[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        result.centroids[c] = points[far];
        continue;
      }
      for (std::size_t d = 0; d < dims; ++d) result.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
  }
  return result;
}

std::vector<std::size_t> valid_frame_indices(const Recording& rec, const CalibrationMap& calib,
                                             std::uint32_t min_supra_taxels) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rec.frames.size(); ++i)
    if (is_valid_frame(rec.frames[i], calib, min_supra_taxels)) out.push_back(i);
  return out;
}

std::vector<TactileFrame> select_frames(const Recording& rec, const CalibrationMap& calib,
                                        const SelectionConfig& cfg, const HandMask& mask) {
  if (cfg.n == 0) throw Error(ErrorKind::Usage, "selection size n must be >= 1");
  const auto valid = valid_frame_indices(rec, calib, cfg.min_supra_taxels);
  if (valid.size() < cfg.n) throw NotEnoughValidFrames(valid.size(), cfg.n);

  std::vector<TactileFrame> out;
  out.reserve(cfg.n);

  if (cfg.strategy == SelectionStrategy::Random) {
    // Partial Fisher-Yates over the valid indices.
    auto pool = valid;
    Rng rng(cfg.seed);
    for (std::size_t i = 0; i < cfg.n; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    pool.resize(cfg.n);
    std::sort(pool.begin(), pool.end());
    for (std::size_t idx : pool) out.push_back(rec.frames[idx]);
    return out;
  }

  std::vector<std::vector<double>> points;
  points.reserve(valid.size());
  for (std::size_t idx : valid) {
    std::vector<double> p;
    p.reserve(mask.indices().size());
    for (std::size_t t : mask.indices()) p.push_back(rec.frames[idx].values[t]);
    points.push_back(std::move(p));
  }

  const auto km = kmeans(points, cfg.n, cfg.seed);
  std::vector<bool> taken(points.size(), false);
  for (const auto& centroid : km.centroids) {
    std::size_t best = points.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (taken[i]) continue;
      const double d = squared_distance(points[i], centroid);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    taken[best] = true;
    out.push_back(rec.frames[valid[best]]);
  }
  return out;
}

}  // namespace smarthand::core
