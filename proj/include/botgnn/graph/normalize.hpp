#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "botgnn/errors.hpp"
#include "botgnn/graph/graph.hpp"
#include "botgnn/tensor.hpp"

namespace botgnn {

enum class Normalization {
  // a_ij / d_j: each message is scaled by its sender's degree. Columns sum
  // to one, so an all-ones input turns into sum_j 1/d_j and keeps degree
  // information alive.
  kSourceDegree,
  // a_ij / sqrt(d_i d_j)
  kSymmetric,
  // a_ij / d_i, the walk transition matrix D^-1 A. With an all-ones input
  // every row maps 1 to 1, so it is kept for spectra and as a negative
  // control rather than for training.
  kRowStochastic,
};

inline std::string_view to_string(Normalization mode) {
  switch (mode) {
    case Normalization::kSourceDegree: return "source-degree";
    case Normalization::kSymmetric: return "symmetric";
    case Normalization::kRowStochastic: return "row-stochastic";
  }
  return "?";
}

inline Normalization parse_normalization(std::string_view s) {
  if (s == "source-degree") return Normalization::kSourceDegree;
  if (s == "symmetric") return Normalization::kSymmetric;
  if (s == "row-stochastic") return Normalization::kRowStochastic;
  throw ConfigError("unknown normalization '" + std::string(s) +
                    "' (expected source-degree, symmetric, row-stochastic)");
}

// Sparse n x n matrix sharing the CSR structure of the graph it came from.
// values()[k] is entry (i, j) for the k-th stored neighbor j of row i;
// transposed_values()[k] is entry (j, i), which lets A^T x be computed as a
// row gather over the same structure.
class NormalizedAdjacency {
 public:
  NormalizedAdjacency(const Graph& g, Normalization mode)
      : mode_(mode),
        offsets_(g.offsets().begin(), g.offsets().end()),
        cols_(g.adjacency().begin(), g.adjacency().end()),
        values_(cols_.size()),
        transposed_(cols_.size()) {
    const std::size_t n = g.n();
    std::vector<double> inv(n, 0.0);
    for (NodeId i = 0; i < n; ++i) {
      if (g.degree(i) > 0) inv[i] = 1.0 / static_cast<double>(g.degree(i));
    }
    for (NodeId i = 0; i < n; ++i) {
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
        const NodeId j = cols_[k];
        switch (mode) {
          case Normalization::kSourceDegree:
            values_[k] = inv[j];
            transposed_[k] = inv[i];
            break;
          case Normalization::kSymmetric:
            values_[k] = transposed_[k] =
                1.0 / std::sqrt(static_cast<double>(g.degree(i)) *
                                static_cast<double>(g.degree(j)));
            break;
          case Normalization::kRowStochastic:
            values_[k] = inv[i];
            transposed_[k] = inv[j];
            break;
        }
      }
    }
  }

  Normalization mode() const noexcept { return mode_; }
  std::size_t n() const noexcept { return offsets_.size() - 1; }
  std::size_t nnz() const noexcept { return cols_.size(); }

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> columns() const noexcept { return cols_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> transposed_values() const noexcept { return transposed_; }

  // Entry (i, j); zero when (i, j) is not an edge.
  double entry(NodeId i, NodeId j) const {
    auto first = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
    auto last = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
    auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - cols_.begin())];
  }

 private:
  Normalization mode_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> cols_;
  std::vector<double> values_;
  std::vector<double> transposed_;
};

inline NormalizedAdjacency normalize(const Graph& g, Normalization mode) {
  return NormalizedAdjacency(g, mode);
}

namespace detail {

inline Tensor2 spmm_impl(const NormalizedAdjacency& a, std::span<const double> vals,
                         const Tensor2& x) {
  if (x.rows() != a.n()) {
    throw InputError("spmm: x has " + std::to_string(x.rows()) +
                     " rows, adjacency has n=" + std::to_string(a.n()));
  }
  const std::size_t h = x.cols();
  Tensor2 out(a.n(), h);
  const auto offsets = a.offsets();
  const auto cols = a.columns();
  // Ascending neighbor order within each row fixes the summation order.
  for (std::size_t i = 0; i < a.n(); ++i) {
    double* o = out.data() + i * h;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      const double w = vals[k];
      const double* xr = x.data() + static_cast<std::size_t>(cols[k]) * h;
      for (std::size_t c = 0; c < h; ++c) o[c] += w * xr[c];
    }
  }
  return out;
}

}  // namespace detail

// A x
inline Tensor2 spmm(const NormalizedAdjacency& a, const Tensor2& x) {
  return detail::spmm_impl(a, a.values(), x);
}

// A^T x
inline Tensor2 spmm_transposed(const NormalizedAdjacency& a, const Tensor2& x) {
  return detail::spmm_impl(a, a.transposed_values(), x);
}

}  // namespace botgnn
