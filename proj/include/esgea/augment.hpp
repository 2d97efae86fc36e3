#pragma once

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "esgea/error.hpp"
#include "esgea/graph.hpp"

namespace esgea {

enum class AggregationMode { concat, mean, max, min, sum, replace };

inline AggregationMode parse_aggregation(std::string_view s) {
  if (s == "concat") return AggregationMode::concat;
  if (s == "mean") return AggregationMode::mean;
  if (s == "max") return AggregationMode::max;
  if (s == "min") return AggregationMode::min;
  if (s == "sum") return AggregationMode::sum;
  if (s == "replace") return AggregationMode::replace;
  throw InvalidArgument("unknown aggregation mode '" + std::string(s) + "'");
}

/// x' = f(x, phi). concat puts x's columns first; elementwise modes need
/// equal widths; replace returns phi.
inline FeatureMatrix aggregate(const FeatureMatrix& x, const FeatureMatrix& phi, AggregationMode mode) {
  if (x.rows() != phi.rows()) {
    throw InvalidArgument("aggregate: row mismatch (" + std::to_string(x.rows()) + " vs " +
                          std::to_string(phi.rows()) + ")");
  }
  const auto& a = x.values();
  const auto& b = phi.values();
  switch (mode) {
    case AggregationMode::replace:
      return phi;
    case AggregationMode::concat: {
      Matrix out(a.rows(), a.cols() + b.cols());
      out << a, b;
      return FeatureMatrix(std::move(out));
    }
    default:
      break;
  }
  if (x.cols() != phi.cols()) {
    throw InvalidArgument("aggregate: elementwise mode needs equal widths, got d=" + std::to_string(x.cols()) +
                          ", d'=" + std::to_string(phi.cols()));
  }
  switch (mode) {
    case AggregationMode::mean:
      return FeatureMatrix(Matrix(0.5 * (a + b)));
    case AggregationMode::max:
      return FeatureMatrix(Matrix(a.cwiseMax(b)));
    case AggregationMode::min:
      return FeatureMatrix(Matrix(a.cwiseMin(b)));
    case AggregationMode::sum:
      return FeatureMatrix(Matrix(a + b));
    default:
      throw InvalidArgument("aggregate: unhandled mode");
  }
}

struct CorruptionSpec {
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

struct CorruptionResult {
  FeatureMatrix features;
  /// Replaced rows, ascending.
  std::vector<NodeId> corrupted;
};

/// Number of rows replaced: round(ratio * n), ties to even.
inline std::size_t corruption_count(double ratio, std::size_t n) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw InvalidArgument("corruption ratio must lie in [0, 1]");
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double c = std::nearbyint(ratio * static_cast<double>(n));
  std::fesetround(saved);
  return std::min(n, static_cast<std::size_t>(c));
}

/// Replaces round(ratio * n) uniformly chosen rows with i.i.d. N(0, 1) rows.
/// Deterministic for a given seed; untouched rows are bit-identical.
inline CorruptionResult corrupt_features(const FeatureMatrix& x, const CorruptionSpec& spec) {
  const std::size_t n = x.rows();
  const std::size_t count = corruption_count(spec.ratio, n);
  std::mt19937_64 rng(spec.seed);

  // Partial Fisher-Yates: the first `count` slots form the sample.
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<NodeId> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(chosen.begin(), chosen.end());

  FeatureMatrix out = x;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (NodeId v : chosen) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(v, c) = normal(rng);
  }
  return {std::move(out), std::move(chosen)};
}

}  // namespace esgea
