#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "honest_forest/rng.hpp"

namespace honest_forest {

// Row-major numeric matrix, n rows of d columns.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& storage() const { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Training sample: features in [0,1]^d with one real response per row.
struct Dataset {
  Matrix features;
  std::vector<double> responses;

  std::size_t n() const { return features.rows(); }
  std::size_t d() const { return features.cols(); }

  bool operator==(const Dataset& other) const = default;
};

enum class DensityKind { Uniform, BoundedMixture };
enum class RegressionKind { Zero, Linear, SinusoidProduct, SinusoidLinear };
enum class NoiseKind { None, Gaussian, BoundedUniform };

// Synthetic data-generating process with fully analytic ground truth:
// the covariate density is bounded away from zero and infinity, the
// regression function is Lipschitz, and every noise law has a moment
// generating function that is finite near zero. All of those constants
// are exposed so experiments can check estimates against exact values.
//
// Densities on [0,1]^d:
//   Uniform            f = 1
//   BoundedMixture(e)  f(x) = e + (1-e) * prod_j (1/2 + x_j)
// Regression functions:
//   Zero               m(x) = 0
//   Linear             m(x) = sum_j coeffs[j] * x_j
//   SinusoidProduct    m(x) = prod_{j: freqs[j] != 0} sin(2 pi freqs[j] x_j)
//   SinusoidLinear     m(x) = sum_j sin(2 pi freqs[j] x_j) + sum_j coeffs[j] * x_j
//                      (freqs[j] == 0 terms contribute nothing)
// Noise laws: None, Gaussian(sigma), BoundedUniform(half_width).
struct TruthDescriptor {
  DensityKind density_kind = DensityKind::Uniform;
  double mixture_eps = 0.2;  // BoundedMixture only, in (0,1)

  RegressionKind regression_kind = RegressionKind::Zero;
  std::vector<double> coeffs;  // Linear / SinusoidLinear
  std::vector<double> freqs;   // SinusoidProduct / SinusoidLinear

  NoiseKind noise_kind = NoiseKind::None;
  double noise_sigma = 1.0;       // Gaussian
  double noise_half_width = 1.0;  // BoundedUniform

  // Throws std::invalid_argument when a parameter is out of range or a
  // coefficient vector does not match the dimension d.
  void validate(std::size_t d) const;

  double density(const std::vector<double>& x) const;
  double regression(const std::vector<double>& x) const;

  // Exact bounds eps <= f <= C on [0,1]^d.
  double density_lower(std::size_t d) const;
  double density_upper(std::size_t d) const;

  // A Lipschitz constant for the regression function (Euclidean norm).
  double regression_lipschitz(std::size_t d) const;

  double noise_variance() const;

  // P(X^j in (a, b]) under the marginal law of coordinate j, in closed form.
  double marginal_interval_prob(std::size_t j, double a, double b) const;
};

// Honest index partition: prediction rows (i_indices) never influence where
// splits land, split rows (j_indices) never enter leaf averages.
struct HonestPartition {
  std::vector<std::size_t> i_indices;
  std::vector<std::size_t> j_indices;

  std::size_t n_i() const { return i_indices.size(); }
  std::size_t n_j() const { return j_indices.size(); }
};

// n iid draws from the descriptor's law, Y = m(X) + noise.
Dataset generate_dataset(const TruthDescriptor& truth, std::size_t n, std::size_t d, std::uint64_t seed);
Dataset generate_dataset(const TruthDescriptor& truth, std::size_t n, std::size_t d, Rng& rng);

// Deterministic sizes n_i = ceil(ratio * n), n_j = n - n_i; the assignment
// is a uniformly random permutation cut. Requires n >= 2, ratio in (0,1).
HonestPartition honest_split(std::size_t n, double ratio, std::uint64_t seed);
HonestPartition honest_split(std::size_t n, double ratio, Rng& rng);

// E[e^{tY} | X = x] in closed form. Finite for every real t for all
// supported noise kinds.
double conditional_mgf(const TruthDescriptor& truth, const std::vector<double>& x, double t);

// Convenience for building sub-matrices (e.g. the J-rows fed to adaptive
// growers) and sub-vectors from an index list.
Matrix gather_rows(const Matrix& source, const std::vector<std::size_t>& indices);
std::vector<double> gather(const std::vector<double>& source, const std::vector<std::size_t>& indices);

}  // namespace honest_forest
