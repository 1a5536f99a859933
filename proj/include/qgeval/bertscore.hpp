#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qgeval/error.hpp"

namespace qgeval {

/// Row-major matrix of unit-length token embeddings.
class EmbeddingMatrix {
 public:
  /// Rows must already be unit length (within 1e-6).
  EmbeddingMatrix(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw InvalidArgument("EmbeddingMatrix: no rows");
    dim_ = rows_.front().size();
    if (dim_ == 0) throw InvalidArgument("EmbeddingMatrix: zero dimension");
    for (const auto& r : rows_) {
      if (r.size() != dim_) throw InvalidArgument("EmbeddingMatrix: ragged rows");
      double n2 = 0.0;
      for (double v : r) {
        if (!std::isfinite(v)) throw InvalidArgument("EmbeddingMatrix: non-finite entry");
        n2 += v * v;
      }
      if (std::abs(std::sqrt(n2) - 1.0) > 1e-6)
        throw InvalidArgument("EmbeddingMatrix: rows must be unit-normalised");
    }
  }

  /// Normalises each row; zero rows are rejected.
  static EmbeddingMatrix normalized(std::vector<std::vector<double>> rows) {
    for (auto& r : rows) {
      double n2 = 0.0;
      for (double v : r) n2 += v * v;
      if (!(n2 > 0.0)) throw InvalidArgument("EmbeddingMatrix: zero vector");
      const double inv = 1.0 / std::sqrt(n2);
      for (double& v : r) v *= inv;
    }
    return EmbeddingMatrix(std::move(rows));
  }

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> row(std::size_t i) const { return rows_.at(i); }

 private:
  std::vector<std::vector<double>> rows_;
  std::size_t dim_ = 0;
};

struct BertScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double mean_best_match(const EmbeddingMatrix& from, const EmbeddingMatrix& to) {
  double total = 0.0;
  for (std::size_t i = 0; i < from.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < to.rows(); ++j) best = std::max(best, dot(from.row(i), to.row(j)));
    total += best;
  }
  return total / static_cast<double>(from.rows());
}

}  // namespace detail

/// Greedy max-cosine matching in both directions, combined as F1.
inline BertScore bert_score(const EmbeddingMatrix& cand, const EmbeddingMatrix& ref) {
  if (cand.dim() != ref.dim()) throw InvalidArgument("bert_score: dimension mismatch");
  BertScore s;
  s.precision = detail::mean_best_match(cand, ref);
  s.recall = detail::mean_best_match(ref, cand);
  const double denom = s.precision + s.recall;
  s.f1 = denom != 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

}  // namespace qgeval
