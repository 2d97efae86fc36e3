#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "esgea/error.hpp"
#include "esgea/laplacian.hpp"
#include "esgea/spectral.hpp"

namespace esgea {

/// Sink for non-fatal diagnostics (solver fallbacks). Defaults to stderr.
inline std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& msg) {
    std::cerr << "esgea: warning: " << msg << '\n';
  };
  return sink;
}

inline void log_warning(const std::string& msg) {
  if (warning_sink()) warning_sink()(msg);
}

struct LanczosOptions {
  std::size_t block_size = 4;
  /// Basis size cap as a multiple of the number of requested eigenvalues.
  std::size_t max_basis_factor = 20;
  std::size_t min_extra_basis = 400;
  double residual_tolerance = 1e-8;
  std::uint64_t seed = 0x5eedULL;
};

/// `count` smallest and `count` largest eigenvalues, each ascending.
struct ExtremeEigenvalues {
  std::vector<double> lower;
  std::vector<double> upper;
  bool converged = false;
  std::size_t basis_size = 0;
};

/// Block Lanczos with full reorthogonalization and Rayleigh-Ritz extraction.
/// Blocks catch eigenvalues of multiplicity up to the block size. Ritz pairs
/// are accepted when ||A y - theta y|| <= tol * max(1, ||A||).
inline ExtremeEigenvalues block_lanczos_extremes(const Eigen::MatrixXd& a, std::size_t count,
                                                 const LanczosOptions& opts = {}) {
  const auto n = static_cast<std::size_t>(a.rows());
  if (count == 0 || 2 * count > n) throw InvalidArgument("block_lanczos_extremes: need 0 < 2*count <= n");
  const std::size_t b = std::clamp<std::size_t>(opts.block_size, 1, n);
  const std::size_t max_basis =
      std::min(n, std::max(opts.max_basis_factor * 2 * count, 2 * count + opts.min_extra_basis));
  const double scale = std::max(1.0, a.cwiseAbs().rowwise().sum().maxCoeff());
  const double tol = opts.residual_tolerance * scale;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd basis(n, max_basis);
  Eigen::MatrixXd image(n, max_basis);
  std::size_t m = 0;

  // Orthonormalizes v against the basis (two Gram-Schmidt passes) and appends it.
  // Returns false when v collapses into the current span.
  auto append = [&](Eigen::VectorXd v) {
    const double before = v.norm();
    if (before == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) {
      if (m > 0) v -= basis.leftCols(m) * (basis.leftCols(m).transpose() * v);
    }
    const double after = v.norm();
    if (after <= 1e-10 * before) return false;
    basis.col(m) = v / after;
    image.col(m) = a * basis.col(m);
    ++m;
    return true;
  };
  auto random_vector = [&] {
    Eigen::VectorXd v(n);
    for (std::size_t i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
  };

  for (std::size_t j = 0; j < b && m < max_basis; ++j) {
    while (!append(random_vector())) {
    }
  }

  ExtremeEigenvalues out;
  std::size_t block_begin = 0;
  std::size_t next_check = std::min(max_basis, std::max<std::size_t>(2 * count + 2 * b, 3 * count));
  for (;;) {
    // Expand with the images of the last block.
    const std::size_t block_end = m;
    for (std::size_t c = block_begin; c < block_end && m < max_basis; ++c) {
      if (!append(image.col(c))) {
        // Invariant subspace found: restart the search in the complement.
        for (int tries = 0; tries < 8 && m < max_basis; ++tries) {
          if (append(random_vector())) break;
        }
      }
    }
    block_begin = block_end;
    if (m < next_check && m < max_basis && m > block_begin) continue;

    const Eigen::MatrixXd v = basis.leftCols(m);
    const Eigen::MatrixXd av = image.leftCols(m);
    Eigen::MatrixXd t = v.transpose() * av;
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t);
    if (ritz.info() != Eigen::Success) break;
    const auto& theta = ritz.eigenvalues();
    const auto& s = ritz.eigenvectors();

    bool ok = m >= 2 * count;
    if (ok && m < n) {
      auto residual = [&](Eigen::Index i) {
        return (av * s.col(i) - theta(i) * (v * s.col(i))).norm();
      };
      for (std::size_t i = 0; i < count && ok; ++i) {
        ok = residual(static_cast<Eigen::Index>(i)) <= tol &&
             residual(static_cast<Eigen::Index>(m - 1 - i)) <= tol;
      }
    }
    if (ok) {
      for (std::size_t i = 0; i < count; ++i) out.lower.push_back(theta(static_cast<Eigen::Index>(i)));
      for (std::size_t i = m - count; i < m; ++i) out.upper.push_back(theta(static_cast<Eigen::Index>(i)));
      out.converged = true;
      out.basis_size = m;
      return out;
    }
    if (m >= max_basis || m == block_begin) break;
    next_check = std::min(max_basis, m + std::max<std::size_t>(count, 4 * b));
  }
  out.basis_size = m;
  return out;
}

/// Spectrum of size n built from the `half` smallest and `half` largest
/// eigenvalues; the interior n - 2*half values are spaced linearly between
/// the largest small and the smallest large eigenvalue, endpoints excluded.
inline std::vector<double> interpolate_interior(const std::vector<double>& lower,
                                                const std::vector<double>& upper, std::size_t n) {
  const std::size_t half = lower.size();
  if (upper.size() != half || 2 * half > n || half == 0) {
    throw InvalidArgument("interpolate_interior: inconsistent extreme sets");
  }
  std::vector<double> spectrum(n);
  std::copy(lower.begin(), lower.end(), spectrum.begin());
  std::copy(upper.begin(), upper.end(), spectrum.end() - static_cast<std::ptrdiff_t>(half));
  const std::size_t interior = n - 2 * half;
  const double lo = lower.back();
  const double hi = upper.front();
  for (std::size_t i = 0; i < interior; ++i) {
    const double frac = static_cast<double>(i + 1) / static_cast<double>(interior + 1);
    spectrum[half + i] = lo + frac * (hi - lo);
  }
  return spectrum;
}

/// Spectrum approximated from `extreme_count` extreme eigenvalues. Matrices
/// with n <= extreme_count are decomposed exactly. A non-converged
/// iterative solve falls back to the dense path with a warning.
inline SpectralDecomposition approx_spectrum(const LaplacianMatrix& lap, std::size_t extreme_count,
                                             const LanczosOptions& opts = {}) {
  if (extreme_count < 2 || extreme_count % 2 != 0) {
    throw InvalidArgument("extreme eigenvalue count must be even and >= 2");
  }
  const auto n = static_cast<std::size_t>(lap.size());
  if (n <= extreme_count) return eigendecompose(lap);
  auto ext = block_lanczos_extremes(lap.matrix, extreme_count / 2, opts);
  if (!ext.converged) {
    log_warning("block Lanczos did not converge on " + std::to_string(n) + "x" + std::to_string(n) +
                " Laplacian (basis " + std::to_string(ext.basis_size) + "); using dense eigensolver");
    return eigendecompose(lap);
  }
  SpectralDecomposition out;
  out.eigenvalues = interpolate_interior(ext.lower, ext.upper, n);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  detail::clamp_spectrum(out.eigenvalues, lap.variant);
  return out;
}

/// Kernel trace over an approximated spectrum, per `config.kernel` and grid.
inline EmbeddingVector approx_trace(const LaplacianMatrix& lap, const DescriptorConfig& config,
                                    const LanczosOptions& opts = {}) {
  config.validate();
  return kernel_trace(approx_spectrum(lap, config.extreme_count, opts), config.grid, config.kernel);
}

}  // namespace esgea
