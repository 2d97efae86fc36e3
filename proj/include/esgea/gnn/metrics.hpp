#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "esgea/error.hpp"
#include "esgea/graph.hpp"

namespace esgea::gnn {

inline constexpr double kProbabilityClamp = 1e-12;

/// -(1/N) sum_j [y_j log p_j + (1 - y_j) log(1 - p_j)], p clamped to
/// [1e-12, 1 - 1e-12].
inline double binary_cross_entropy(std::span<const double> p, std::span<const int> y) {
  if (p.size() != y.size()) {
    throw InvalidArgument("binary_cross_entropy: " + std::to_string(p.size()) + " probabilities vs " +
                          std::to_string(y.size()) + " labels");
  }
  if (p.empty()) throw InvalidArgument("binary_cross_entropy: empty input");
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (y[j] != 0 && y[j] != 1) throw InvalidArgument("binary_cross_entropy: labels must be 0 or 1");
    const double q = std::clamp(p[j], kProbabilityClamp, 1.0 - kProbabilityClamp);
    sum += y[j] == 1 ? std::log(q) : std::log(1.0 - q);
  }
  return -sum / static_cast<double>(p.size());
}

/// Row-wise softmax with max subtraction.
inline Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    double z = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      out(r, c) = std::exp(logits(r, c) - mx);
      z += out(r, c);
    }
    out.row(r) /= z;
  }
  return out;
}

/// Mean multi-class cross-entropy over `rows` and its gradient w.r.t. the
/// logits (zero outside `rows`). For two classes this equals
/// binary_cross_entropy on the class-1 probability.
struct CrossEntropy {
  double loss = 0.0;
  Matrix grad;
};

inline CrossEntropy softmax_cross_entropy(const Matrix& logits, std::span<const int> labels,
                                          std::span<const std::size_t> rows) {
  if (rows.empty()) throw InvalidArgument("softmax_cross_entropy: no rows selected");
  const Matrix prob = softmax_rows(logits);
  CrossEntropy ce{0.0, Matrix::Zero(logits.rows(), logits.cols())};
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (std::size_t r : rows) {
    const auto y = labels[r];
    if (y < 0 || y >= logits.cols()) throw InvalidArgument("label out of range for classifier head");
    ce.loss -= std::log(std::max(prob(r, y), kProbabilityClamp));
    ce.grad.row(r) = prob.row(r) * scale;
    ce.grad(r, y) -= scale;
  }
  ce.loss *= scale;
  return ce;
}

/// Area under the ROC curve as the normalized Mann-Whitney U; ties count 1/2.
inline double evaluate_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("evaluate_auc: length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  // Midranks over tie groups.
  double rank_sum_pos = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum_pos += midrank;
        ++pos;
      } else if (labels[order[k]] != 0) {
        throw InvalidArgument("evaluate_auc: labels must be 0 or 1");
      }
    }
    i = j;
  }
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) throw InvalidArgument("evaluate_auc: both classes must be present");
  const double u = rank_sum_pos - static_cast<double>(pos) * static_cast<double>(pos + 1) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

inline double evaluate_accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw InvalidArgument("evaluate_accuracy: length mismatch");
  if (predictions.empty()) throw InvalidArgument("evaluate_accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

/// Macro one-vs-rest AUC over class probabilities; binary case uses column 1.
inline double evaluate_multiclass_auc(const Matrix& prob, std::span<const int> labels) {
  if (prob.cols() == 2) {
    std::vector<double> s(static_cast<std::size_t>(prob.rows()));
    for (Eigen::Index r = 0; r < prob.rows(); ++r) s[static_cast<std::size_t>(r)] = prob(r, 1);
    return evaluate_auc(s, labels);
  }
  double total = 0.0;
  std::size_t used = 0;
  for (Eigen::Index c = 0; c < prob.cols(); ++c) {
    std::vector<double> s;
    std::vector<int> y;
    for (Eigen::Index r = 0; r < prob.rows(); ++r) {
      s.push_back(prob(r, c));
      y.push_back(labels[static_cast<std::size_t>(r)] == c ? 1 : 0);
    }
    const bool both = std::count(y.begin(), y.end(), 1) > 0 && std::count(y.begin(), y.end(), 0) > 0;
    if (!both) continue;
    total += evaluate_auc(s, y);
    ++used;
  }
  if (used == 0) throw InvalidArgument("evaluate_multiclass_auc: no class has both outcomes");
  return total / static_cast<double>(used);
}

inline std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Eigen::Index best = 0;
    m.row(r).maxCoeff(&best);
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace esgea::gnn
