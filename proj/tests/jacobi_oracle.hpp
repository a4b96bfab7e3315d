#pragma once

// Dense symmetric eigenvalues by cyclic Jacobi rotations. Test-only oracle
// for the sparse spectral code.

#include <algorithm>
#include <cmath>
#include <vector>

#include "botgnn/graph/graph.hpp"

namespace testing_oracle {

inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

// Spectrum of D^-1/2 A D^-1/2 (a loop counts once on the diagonal).
inline std::vector<double> walk_spectrum(const botgnn::Graph& g) {
  const std::size_t n = g.n();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (botgnn::NodeId i = 0; i < n; ++i) {
    for (botgnn::NodeId j : g.neighbors(i)) {
      a[i][j] = 1.0 / std::sqrt(static_cast<double>(g.degree(i)) * g.degree(j));
    }
  }
  return jacobi_eigenvalues(std::move(a));
}

}  // namespace testing_oracle
