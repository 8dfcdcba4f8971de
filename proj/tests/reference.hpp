#pragma once

// Plain-loop reimplementations used as oracles. Nothing here touches the
// tensor library; inputs and outputs are nested std::vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace reference {

using Vec = std::vector<double>;
using Rows = std::vector<Vec>;  // Rows[r][c]

inline Vec mat_vec(const Rows& m, const Vec& x) {
  Vec y(m.size(), 0.0);
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < x.size(); ++c) y[r] += m[r][c] * x[c];
  return y;
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

struct Pair {
  std::size_t start, end;
};

// d' = relu(theta (d * s_i * e_j) + d) for each edge row.
inline Rows edge_update(const Rows& start, const Rows& end, const std::vector<Pair>& pairs,
                        const Rows& edges, const Rows& theta) {
  Rows out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    Vec x(edges[k].size());
    for (std::size_t c = 0; c < x.size(); ++c)
      x[c] = edges[k][c] * start[pairs[k].start][c] * end[pairs[k].end][c];
    Vec y = mat_vec(theta, x);
    for (std::size_t c = 0; c < y.size(); ++c) y[c] = relu(y[c] + edges[k][c]);
    out.push_back(y);
  }
  return out;
}

// Divides each edge row by the per-dimension sum over edges sharing its head.
inline Rows normalize(const Rows& edges, const std::vector<std::size_t>& heads, double eps) {
  Rows out = edges;
  for (std::size_t k = 0; k < edges.size(); ++k)
    for (std::size_t c = 0; c < edges[k].size(); ++c) {
      double mass = 0.0;
      for (std::size_t q = 0; q < edges.size(); ++q)
        if (heads[q] == heads[k]) mass += edges[q][c];
      out[k][c] = edges[k][c] / (mass + eps);
    }
  return out;
}

// Returns {new_start, new_end}.
inline std::pair<Rows, Rows> node_update(const Rows& start, const Rows& end,
                                         const std::vector<Pair>& pairs, const Rows& w_s2e,
                                         const Rows& w_e2s, const Rows& theta_start,
                                         const Rows& theta_end) {
  const std::size_t n = start.size(), d = start[0].size();
  Rows to_start(n, Vec(d, 0.0)), to_end(n, Vec(d, 0.0));
  for (std::size_t k = 0; k < pairs.size(); ++k)
    for (std::size_t c = 0; c < d; ++c) {
      to_end[pairs[k].end][c] += w_s2e[k][c] * start[pairs[k].start][c];
      to_start[pairs[k].start][c] += w_e2s[k][c] * end[pairs[k].end][c];
    }
  Rows new_start(n), new_end(n);
  for (std::size_t t = 0; t < n; ++t) {
    new_start[t] = mat_vec(theta_start, to_start[t]);
    new_end[t] = mat_vec(theta_end, to_end[t]);
    for (std::size_t c = 0; c < d; ++c) {
      new_start[t][c] = relu(new_start[t][c] + start[t][c]);
      new_end[t][c] = relu(new_end[t][c] + end[t][c]);
    }
  }
  return {new_start, new_end};
}

inline double weighted_bl_loss(const Vec& p, const std::vector<std::uint8_t>& b) {
  const double n = static_cast<double>(p.size());
  double pos = 0.0;
  for (auto x : b) pos += x;
  const double neg = n - pos;
  double a_pos = pos > 0 ? n / pos : 0.0;
  double a_neg = neg > 0 ? n / neg : 0.0;
  if (pos == 0) a_neg = 1.0;
  if (neg == 0) a_pos = 1.0;
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k)
    total += b[k] ? a_pos * std::log(p[k]) : a_neg * std::log(1.0 - p[k]);
  return -total / n;
}

inline double fuse(double ps, double pe, double pc) { return ps * pe * pc; }

inline double tiou(double s1, double e1, double s2, double e2) {
  double inter = 0.0;
  if (e1 > s2 && e2 > s1) inter = std::min(e1, e2) - std::max(s1, s2);
  const double uni = (e1 - s1) + (e2 - s2) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

struct Scored {
  double start, end, score;
};

inline std::vector<Scored> soft_nms(std::vector<Scored> pool, double sigma, double floor,
                                    std::size_t top_k) {
  std::vector<Scored> kept;
  while (!pool.empty() && kept.size() < top_k) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < pool.size(); ++k)
      if (pool[k].score > pool[best].score) best = k;
    const Scored chosen = pool[best];
    kept.push_back(chosen);
    std::vector<Scored> rest;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (k == best) continue;
      Scored p = pool[k];
      const double o = tiou(chosen.start, chosen.end, p.start, p.end);
      p.score *= std::exp(-o * o / sigma);
      if (p.score >= floor) rest.push_back(p);
    }
    pool = rest;
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
  return kept;
}

// Trapezoid rule over AN = 1..100, area normalised by 100 and scaled by 100.
inline double auc(const Vec& curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k) area += (curve[k - 1] + curve[k]) / 2.0;
  return area;
}

}  // namespace reference
