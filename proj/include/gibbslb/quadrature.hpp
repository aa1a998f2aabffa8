#pragma once

#include "gibbslb/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace gibbslb {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Newton iteration on P_n from the Chebyshev initial guess.
inline GaussRule make_gauss_legendre(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

inline const GaussRule& gauss_legendre(int n) {
  static std::mutex m;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

// Nodes and weights of the composite rule on the given panel edges.
struct NodeSet {
  std::vector<double> t;
  std::vector<double> w;
};

inline NodeSet composite_nodes(const std::vector<double>& edges, int order) {
  const GaussRule& g = gauss_legendre(order);
  NodeSet ns;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int k = 0; k < order; ++k) {
      ns.t.push_back(c + h * g.x[k]);
      ns.w.push_back(h * g.w[k]);
    }
  }
  return ns;
}

template <class F>
double composite_gl(F&& f, const std::vector<double>& edges, int order) {
  const GaussRule& g = gauss_legendre(order);
  double acc = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double s = 0.0;
    for (int k = 0; k < order; ++k) s += g.w[k] * f(c + h * g.x[k]);
    acc += h * s;
  }
  return acc;
}

// Panel edges of width h covering [lo, hi], aligned so that `anchor` is an edge.
inline std::vector<double> aligned_edges(double lo, double hi, double h, double anchor) {
  const double k0 = std::floor((lo - anchor) / h);
  const double k1 = std::ceil((hi - anchor) / h);
  std::vector<double> e;
  for (double k = k0; k <= k1; k += 1.0) e.push_back(anchor + k * h);
  return e;
}

}  // namespace gibbslb
