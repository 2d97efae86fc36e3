#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "esgea/error.hpp"
#include "esgea/graph.hpp"
#include "esgea/laplacian.hpp"

namespace esgea {

/// Ascending Laplacian eigenvalues, optionally with orthonormal eigenvectors
/// stored as columns.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::optional<Eigen::MatrixXd> eigenvectors;

  std::size_t size() const { return eigenvalues.size(); }
};

/// Strictly increasing positive time points.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw InvalidArgument("time grid is empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i]) || points_[i] <= 0.0) {
        throw InvalidArgument("time grid points must be finite and > 0");
      }
      if (i > 0 && points_[i] <= points_[i - 1]) {
        throw InvalidArgument("time grid must be strictly increasing");
      }
    }
  }

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<double> points_;
};

/// `dim` log-spaced points on [t_min, t_max], endpoints included exactly.
inline TimeGrid default_time_grid(std::size_t dim = 20, double t_min = 1e-2, double t_max = 1e2) {
  if (dim < 2) throw InvalidArgument("time grid dimension must be >= 2");
  if (!(t_min > 0.0) || !(t_min < t_max) || !std::isfinite(t_max)) {
    throw InvalidArgument("time grid requires 0 < t_min < t_max");
  }
  std::vector<double> pts(dim);
  const double lo = std::log10(t_min);
  const double hi = std::log10(t_max);
  for (std::size_t i = 0; i < dim; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(dim - 1);
    pts[i] = std::pow(10.0, lo + frac * (hi - lo));
  }
  pts.front() = t_min;
  pts.back() = t_max;
  return TimeGrid(std::move(pts));
}

enum class KernelKind { heat, wave };
enum class Normalization { none, by_node_count };

/// How spectra are obtained: always dense, always the extreme-eigenvalue
/// approximation (when the matrix is larger than the extreme count), or
/// dense up to `approx_threshold` nodes and approximate above.
enum class ApproximationMode { automatic, exact, extreme };

struct DescriptorConfig {
  KernelKind kernel = KernelKind::heat;
  TimeGrid grid = default_time_grid();
  LaplacianVariant laplacian = LaplacianVariant::unnormalized;
  Normalization normalization = Normalization::none;
  ApproximationMode approximation = ApproximationMode::automatic;
  std::size_t approx_threshold = 1024;
  std::size_t extreme_count = 100;

  void validate() const {
    if (grid.size() == 0) throw InvalidArgument("descriptor grid is empty");
    if (extreme_count < 2 || extreme_count % 2 != 0) {
      throw InvalidArgument("extreme eigenvalue count must be even and >= 2, got " +
                            std::to_string(extreme_count));
    }
  }

  std::size_t dim() const { return grid.size(); }
};

inline KernelKind parse_kernel(std::string_view s) {
  if (s == "heat") return KernelKind::heat;
  if (s == "wave") return KernelKind::wave;
  throw InvalidArgument("unknown kernel '" + std::string(s) + "'");
}

inline Normalization parse_normalization(std::string_view s) {
  if (s == "none") return Normalization::none;
  if (s == "by-node-count" || s == "nodes") return Normalization::by_node_count;
  throw InvalidArgument("unknown normalization '" + std::string(s) + "'");
}

inline ApproximationMode parse_approximation(std::string_view s) {
  if (s == "auto") return ApproximationMode::automatic;
  if (s == "exact") return ApproximationMode::exact;
  if (s == "extreme") return ApproximationMode::extreme;
  throw InvalidArgument("unknown approximation mode '" + std::string(s) + "'");
}

/// Descriptor values for one (sub)graph; `center` is the ego node when the
/// vector came from an ego subgraph.
struct EmbeddingVector {
  std::vector<double> values;
  NodeId center = 0;
};

inline constexpr double kEigenvalueClampTolerance = 1e-10;

namespace detail {

/// Clamps numerical noise around the valid Laplacian range, rejects real violations.
inline void clamp_spectrum(std::vector<double>& ev, LaplacianVariant variant) {
  const double upper = variant == LaplacianVariant::symmetric_normalized ? 2.0 : INFINITY;
  for (double& v : ev) {
    if (v < 0.0) {
      if (v < -kEigenvalueClampTolerance) {
        throw NumericalError("Laplacian eigenvalue " + std::to_string(v) + " below zero");
      }
      v = 0.0;
    }
    if (v > upper) {
      if (v > upper + 1e-8) {
        throw NumericalError("normalized Laplacian eigenvalue " + std::to_string(v) + " above 2");
      }
      v = upper;
    }
  }
}

}  // namespace detail

/// Full dense symmetric eigendecomposition.
inline SpectralDecomposition eigendecompose(const LaplacianMatrix& lap, bool with_vectors = false) {
  const auto n = lap.size();
  if (n == 0) throw InvalidArgument("eigendecompose: empty matrix");
  SpectralDecomposition out;
  if (n == 1) {
    out.eigenvalues = {lap.matrix(0, 0)};
    if (with_vectors) out.eigenvectors = Eigen::MatrixXd::Identity(1, 1);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        lap.matrix, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("eigensolver did not converge on " + std::to_string(n) + "x" +
                           std::to_string(n) + " Laplacian");
    }
    const auto& vals = solver.eigenvalues();
    out.eigenvalues.assign(vals.data(), vals.data() + vals.size());
    if (with_vectors) out.eigenvectors = solver.eigenvectors();
  }
  detail::clamp_spectrum(out.eigenvalues, lap.variant);
  return out;
}

/// h_t = sum_i exp(-lambda_i t) = tr(exp(-L t)).
inline EmbeddingVector heat_trace(const SpectralDecomposition& spec, const TimeGrid& grid) {
  if (spec.eigenvalues.empty()) throw InvalidArgument("heat_trace: empty spectrum");
  EmbeddingVector out;
  out.values.reserve(grid.size());
  for (double t : grid.points()) {
    double sum = 0.0;
    for (double lambda : spec.eigenvalues) sum += std::exp(-lambda * t);
    out.values.push_back(sum);
  }
  return out;
}

/// w_t = | sum_i exp(-i lambda_i t) |, the magnitude of tr(exp(-i L t)).
inline EmbeddingVector wave_trace(const SpectralDecomposition& spec, const TimeGrid& grid) {
  if (spec.eigenvalues.empty()) throw InvalidArgument("wave_trace: empty spectrum");
  EmbeddingVector out;
  out.values.reserve(grid.size());
  for (double t : grid.points()) {
    double re = 0.0;
    double im = 0.0;
    for (double lambda : spec.eigenvalues) {
      re += std::cos(lambda * t);
      im -= std::sin(lambda * t);
    }
    out.values.push_back(std::hypot(re, im));
  }
  return out;
}

inline EmbeddingVector kernel_trace(const SpectralDecomposition& spec, const TimeGrid& grid, KernelKind kernel) {
  return kernel == KernelKind::heat ? heat_trace(spec, grid) : wave_trace(spec, grid);
}

}  // namespace esgea
