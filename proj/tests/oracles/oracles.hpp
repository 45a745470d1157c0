#pragma once

// Slow, independent reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace oracle {

// Position of index i after bouncing off both ends ("abc|cba" reflection),
// done by repeated folding rather than modular arithmetic.
inline std::size_t bounce(long long i, long long n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return static_cast<std::size_t>(i);
}

// Dense T x T smoothing matrix applied to x.
inline std::vector<double> dense_gaussian_smooth(const std::vector<double>& x, double sigma, double truncate = 4.0) {
  const long long n = static_cast<long long>(x.size());
  const long long r = static_cast<long long>(std::ceil(truncate * sigma));
  std::vector<double> g;
  double total = 0.0;
  for (long long k = -r; k <= r; ++k) {
    g.push_back(std::exp(-0.5 * static_cast<double>(k * k) / (sigma * sigma)));
    total += g.back();
  }
  std::vector<std::vector<double>> m(x.size(), std::vector<double>(x.size(), 0.0));
  for (long long t = 0; t < n; ++t) {
    for (long long k = -r; k <= r; ++k) m[t][bounce(t + k, n)] += g[k + r] / total;
  }
  std::vector<double> out(x.size(), 0.0);
  for (long long t = 0; t < n; ++t) {
    for (long long j = 0; j < n; ++j) out[t] += m[t][j] * x[j];
  }
  return out;
}

struct Peak {
  std::size_t index;
  double height;
  double prominence;
};

inline std::vector<Peak> brute_force_peaks(const std::vector<double>& x, std::size_t min_distance,
                                           std::optional<double> min_height) {
  const std::size_t n = x.size();
  std::vector<std::size_t> found;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i;
    while (lo > 0 && x[lo - 1] == x[i]) --lo;
    std::size_t hi = i;
    while (hi + 1 < n && x[hi + 1] == x[i]) ++hi;
    if (lo == 0 || hi + 1 == n) continue;
    if (!(x[lo - 1] < x[i] && x[hi + 1] < x[i])) continue;
    if (i != (lo + hi) / 2) continue;
    if (min_height && x[i] < *min_height) continue;
    found.push_back(i);
  }
  // Priority: higher first, lower index first among equals.
  std::vector<std::size_t> order = found;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] > x[b];
    return a < b;
  });
  std::vector<std::size_t> kept;
  for (std::size_t c : order) {
    bool ok = true;
    for (std::size_t k : kept) {
      const std::size_t d = c > k ? c - k : k - c;
      if (d < min_distance) ok = false;
    }
    if (ok) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<Peak> out;
  for (std::size_t c : kept) {
    double left = x[c];
    for (std::size_t j = c; j > 0; --j) {
      if (x[j - 1] > x[c]) break;
      left = std::min(left, x[j - 1]);
    }
    double right = x[c];
    for (std::size_t j = c + 1; j < n; ++j) {
      if (x[j] > x[c]) break;
      right = std::min(right, x[j]);
    }
    out.push_back({c, x[c], x[c] - std::max(left, right)});
  }
  return out;
}

// Mean of the alpha samples after t minus mean of the alpha samples before t,
// edge values repeated outside the sequence.
inline std::vector<double> windowed_difference(const std::vector<double>& x, std::size_t alpha) {
  const long long n = static_cast<long long>(x.size());
  std::vector<double> out(x.size());
  for (long long t = 0; t < n; ++t) {
    double after = 0.0;
    double before = 0.0;
    for (long long k = 1; k <= static_cast<long long>(alpha); ++k) {
      after += x[std::min(n - 1, t + k)];
      before += x[std::max(0LL, t - k)];
    }
    out[t] = after / static_cast<double>(alpha) - before / static_cast<double>(alpha);
  }
  return out;
}

struct Match {
  std::vector<bool> tp;  // in rank order
  std::size_t matched = 0;
};

// Ranks predictions (score desc, step asc) and, one at a time, hands each the
// closest free truth within tolerance (earlier truth on equal distance).
inline Match greedy_match(const std::vector<std::pair<long long, double>>& preds, const std::vector<long long>& truth,
                          long long tol) {
  std::vector<std::pair<long long, double>> ranked = preds;
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<bool> used(truth.size(), false);
  Match m;
  for (const auto& [step, score] : ranked) {
    (void)score;
    long long best = -1;
    long long best_distance = tol + 1;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (used[j]) continue;
      const long long d = std::llabs(truth[j] - step);
      const bool closer = d < best_distance || (d == best_distance && best >= 0 && truth[j] < truth[best]);
      if (d <= tol && closer) {
        best = static_cast<long long>(j);
        best_distance = d;
      }
    }
    if (best >= 0) {
      used[best] = true;
      ++m.matched;
    }
    m.tp.push_back(best >= 0);
  }
  return m;
}

// Area under the stepwise precision-recall curve, computed by walking the
// curve and adding rectangles at each recall increase.
inline std::optional<double> stepwise_ap(const std::vector<bool>& tp, std::size_t num_truth) {
  if (num_truth == 0) return tp.empty() ? std::nullopt : std::optional<double>(0.0);
  double area = 0.0;
  double previous_recall = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < tp.size(); ++i) {
    if (tp[i]) ++hits;
    const double recall = static_cast<double>(hits) / static_cast<double>(num_truth);
    const double precision = static_cast<double>(hits) / static_cast<double>(i + 1);
    area += (recall - previous_recall) * precision;
    previous_recall = recall;
  }
  return area;
}

// Central differences of f at every coordinate of `theta`.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> theta, double h = 1e-5) {
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    const double up = f(theta);
    theta[i] = saved - h;
    const double down = f(theta);
    theta[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// Splitmix-style generator so oracle inputs do not depend on <random>.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

}  // namespace oracle
