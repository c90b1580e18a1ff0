#include "honest_forest/data.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace honest_forest {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Component density of the non-uniform mixture part, g(t) = 1/2 + t on [0,1].
double mixture_component(double t) { return 0.5 + t; }

// Inverse CDF of g: solve t^2/2 + t/2 = u.
double mixture_component_quantile(double u) { return std::sqrt(0.25 + 2.0 * u) - 0.5; }

double mixture_component_cdf(double t) { return 0.5 * t + 0.5 * t * t; }

}  // namespace

void TruthDescriptor::validate(std::size_t d) const {
  if (density_kind == DensityKind::BoundedMixture) {
    if (!(mixture_eps > 0.0 && mixture_eps < 1.0)) {
      throw std::invalid_argument("TruthDescriptor: mixture eps must lie in (0,1)");
    }
  }
  switch (regression_kind) {
    case RegressionKind::Zero:
      break;
    case RegressionKind::Linear:
      if (coeffs.size() != d) throw std::invalid_argument("TruthDescriptor: coeffs must have length d");
      break;
    case RegressionKind::SinusoidProduct:
      if (freqs.size() != d) throw std::invalid_argument("TruthDescriptor: freqs must have length d");
      break;
    case RegressionKind::SinusoidLinear:
      if (freqs.size() != d) throw std::invalid_argument("TruthDescriptor: freqs must have length d");
      if (coeffs.size() != d) throw std::invalid_argument("TruthDescriptor: coeffs must have length d");
      break;
  }
  if (noise_kind == NoiseKind::Gaussian && !(noise_sigma > 0.0)) {
    throw std::invalid_argument("TruthDescriptor: gaussian sigma must be positive");
  }
  if (noise_kind == NoiseKind::BoundedUniform && !(noise_half_width > 0.0)) {
    throw std::invalid_argument("TruthDescriptor: uniform noise half_width must be positive");
  }
}

double TruthDescriptor::density(const std::vector<double>& x) const {
  switch (density_kind) {
    case DensityKind::Uniform:
      return 1.0;
    case DensityKind::BoundedMixture: {
      double prod = 1.0;
      for (double t : x) prod *= mixture_component(t);
      return mixture_eps + (1.0 - mixture_eps) * prod;
    }
  }
  return 1.0;
}

double TruthDescriptor::regression(const std::vector<double>& x) const {
  switch (regression_kind) {
    case RegressionKind::Zero:
      return 0.0;
    case RegressionKind::Linear: {
      double s = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) s += coeffs[j] * x[j];
      return s;
    }
    case RegressionKind::SinusoidProduct: {
      double prod = 1.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (freqs[j] != 0.0) prod *= std::sin(kTwoPi * freqs[j] * x[j]);
      }
      return prod;
    }
    case RegressionKind::SinusoidLinear: {
      double s = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (freqs[j] != 0.0) s += std::sin(kTwoPi * freqs[j] * x[j]);
        s += coeffs[j] * x[j];
      }
      return s;
    }
  }
  return 0.0;
}

double TruthDescriptor::density_lower(std::size_t d) const {
  switch (density_kind) {
    case DensityKind::Uniform:
      return 1.0;
    case DensityKind::BoundedMixture:
      // prod_j g >= (1/2)^d, so f >= eps + (1-eps) 2^{-d}; eps alone is the
      // conservative bound exposed to callers.
      (void)d;
      return mixture_eps;
  }
  return 1.0;
}

double TruthDescriptor::density_upper(std::size_t d) const {
  switch (density_kind) {
    case DensityKind::Uniform:
      return 1.0;
    case DensityKind::BoundedMixture:
      return mixture_eps + (1.0 - mixture_eps) * std::pow(1.5, static_cast<double>(d));
  }
  return 1.0;
}

double TruthDescriptor::regression_lipschitz(std::size_t d) const {
  switch (regression_kind) {
    case RegressionKind::Zero:
      return 0.0;
    case RegressionKind::Linear: {
      double s = 0.0;
      for (double c : coeffs) s += c * c;
      return std::sqrt(s);
    }
    case RegressionKind::SinusoidProduct: {
      // |d/dx_j| <= 2 pi |w_j| since every other factor is bounded by 1.
      double s = 0.0;
      for (double w : freqs) s += kTwoPi * w * kTwoPi * w;
      return std::sqrt(s);
    }
    case RegressionKind::SinusoidLinear: {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double g = kTwoPi * std::abs(freqs[j]) + std::abs(coeffs[j]);
        s += g * g;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

double TruthDescriptor::noise_variance() const {
  switch (noise_kind) {
    case NoiseKind::None:
      return 0.0;
    case NoiseKind::Gaussian:
      return noise_sigma * noise_sigma;
    case NoiseKind::BoundedUniform:
      return noise_half_width * noise_half_width / 3.0;
  }
  return 0.0;
}

double TruthDescriptor::marginal_interval_prob(std::size_t j, double a, double b) const {
  (void)j;
  switch (density_kind) {
    case DensityKind::Uniform:
      return b - a;
    case DensityKind::BoundedMixture:
      // Marginal of coordinate j is eps + (1-eps) g(t): the other
      // coordinates integrate to one in both mixture parts.
      return mixture_eps * (b - a) +
             (1.0 - mixture_eps) * (mixture_component_cdf(b) - mixture_component_cdf(a));
  }
  return b - a;
}

Dataset generate_dataset(const TruthDescriptor& truth, std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return generate_dataset(truth, n, d, rng);
}

Dataset generate_dataset(const TruthDescriptor& truth, std::size_t n, std::size_t d, Rng& rng) {
  if (n < 1) throw std::invalid_argument("generate_dataset: n must be >= 1");
  if (d < 1) throw std::invalid_argument("generate_dataset: d must be >= 1");
  truth.validate(d);

  Dataset data;
  data.features = Matrix(n, d);
  data.responses.resize(n);

  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    switch (truth.density_kind) {
      case DensityKind::Uniform:
        for (std::size_t j = 0; j < d; ++j) x[j] = rng.uniform01();
        break;
      case DensityKind::BoundedMixture:
        if (rng.uniform01() < truth.mixture_eps) {
          for (std::size_t j = 0; j < d; ++j) x[j] = rng.uniform01();
        } else {
          for (std::size_t j = 0; j < d; ++j) x[j] = mixture_component_quantile(rng.uniform01());
        }
        break;
    }
    for (std::size_t j = 0; j < d; ++j) data.features(i, j) = x[j];

    double y = truth.regression(x);
    switch (truth.noise_kind) {
      case NoiseKind::None:
        break;
      case NoiseKind::Gaussian:
        y += truth.noise_sigma * rng.normal();
        break;
      case NoiseKind::BoundedUniform:
        y += truth.noise_half_width * (2.0 * rng.uniform01() - 1.0);
        break;
    }
    data.responses[i] = y;
  }
  return data;
}

HonestPartition honest_split(std::size_t n, double ratio, std::uint64_t seed) {
  Rng rng(seed);
  return honest_split(n, ratio, rng);
}

HonestPartition honest_split(std::size_t n, double ratio, Rng& rng) {
  if (n < 2) throw std::invalid_argument("honest_split: n must be >= 2");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("honest_split: ratio must lie in (0,1)");

  const std::size_t n_i = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n)));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm);

  HonestPartition part;
  part.i_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_i));
  part.j_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_i), perm.end());
  return part;
}

double conditional_mgf(const TruthDescriptor& truth, const std::vector<double>& x, double t) {
  const double m = truth.regression(x);
  double noise_mgf = 1.0;
  switch (truth.noise_kind) {
    case NoiseKind::None:
      break;
    case NoiseKind::Gaussian:
      noise_mgf = std::exp(0.5 * truth.noise_sigma * truth.noise_sigma * t * t);
      break;
    case NoiseKind::BoundedUniform: {
      const double th = t * truth.noise_half_width;
      noise_mgf = th == 0.0 ? 1.0 : std::sinh(th) / th;
      break;
    }
  }
  return std::exp(t * m) * noise_mgf;
}

Matrix gather_rows(const Matrix& source, const std::vector<std::size_t>& indices) {
  Matrix result(indices.size(), source.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    for (std::size_t j = 0; j < source.cols(); ++j) result(r, j) = source(indices[r], j);
  }
  return result;
}

std::vector<double> gather(const std::vector<double>& source, const std::vector<std::size_t>& indices) {
  std::vector<double> result(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) result[r] = source[indices[r]];
  return result;
}

}  // namespace honest_forest
