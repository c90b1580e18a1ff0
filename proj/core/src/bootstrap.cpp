#include "honest_forest/bootstrap.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace honest_forest {

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) * 0.3989422804014326779399461; }

// E[exp(t W)] for W = exp(sigma Z - sigma^2/2), t <= 0, by composite
// Simpson quadrature in z. The integrand is smooth and bounded by phi(z).
double lognormal_mgf(double sigma, double t) {
  const double half = 12.0;
  const std::size_t intervals = 4800;  // even
  const double h = 2.0 * half / static_cast<double>(intervals);
  auto f = [&](double z) {
    return std::exp(t * std::exp(sigma * z - 0.5 * sigma * sigma)) * normal_pdf(z);
  };
  double acc = f(-half) + f(half);
  for (std::size_t k = 1; k < intervals; ++k) {
    const double z = -half + h * static_cast<double>(k);
    acc += f(z) * (k % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

}  // namespace

long WeightScheme::resolve_m(std::size_t n) const {
  if (kind != WeightSchemeKind::Multinomial && kind != WeightSchemeKind::WithoutReplacement) {
    throw std::invalid_argument("WeightScheme: only resampling schemes carry a sample count m");
  }
  if (fixed_m.has_value() == m_schedule.has_value()) {
    throw std::invalid_argument("WeightScheme: exactly one of fixed m and m schedule must be set");
  }
  const long m = fixed_m ? *fixed_m : evaluate_schedule(*m_schedule, n);
  if (m < 1) throw std::invalid_argument("WeightScheme: m must be >= 1");
  if (kind == WeightSchemeKind::WithoutReplacement && m > static_cast<long>(n)) {
    throw std::invalid_argument("WeightScheme: without-replacement needs m <= n");
  }
  return m;
}

void WeightScheme::validate(std::size_t n) const {
  switch (kind) {
    case WeightSchemeKind::Multinomial:
    case WeightSchemeKind::WithoutReplacement:
      resolve_m(n);
      break;
    case WeightSchemeKind::WildPoisson:
      break;
    case WeightSchemeKind::WildLogNormal:
      if (!(lognormal_sigma > 0.0)) {
        throw std::invalid_argument("WeightScheme: lognormal sigma must be positive");
      }
      break;
  }
}

double WeightVector::sum() const {
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

WeightVector draw_weights(const WeightScheme& scheme, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return draw_weights(scheme, n, rng);
}

WeightVector draw_weights(const WeightScheme& scheme, std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("draw_weights: n must be >= 1");
  WeightVector out;
  out.w.assign(n, 0.0);
  switch (scheme.kind) {
    case WeightSchemeKind::Multinomial: {
      const long m = scheme.resolve_m(n);
      for (long k = 0; k < m; ++k) out.w[rng.index(n)] += 1.0;
      break;
    }
    case WeightSchemeKind::WithoutReplacement: {
      const long m = scheme.resolve_m(n);
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (long k = 0; k < m; ++k) {
        const std::size_t pick = static_cast<std::size_t>(k) + rng.index(n - static_cast<std::size_t>(k));
        std::swap(idx[static_cast<std::size_t>(k)], idx[pick]);
        out.w[idx[static_cast<std::size_t>(k)]] = 1.0;
      }
      break;
    }
    case WeightSchemeKind::WildPoisson:
      for (std::size_t i = 0; i < n; ++i) out.w[i] = static_cast<double>(rng.poisson(1.0));
      break;
    case WeightSchemeKind::WildLogNormal: {
      const double sigma = scheme.lognormal_sigma;
      for (std::size_t i = 0; i < n; ++i) {
        out.w[i] = std::exp(sigma * rng.normal() - 0.5 * sigma * sigma);
      }
      break;
    }
  }
  return out;
}

MomentReport analytic_moments(const WeightScheme& scheme, std::size_t n) {
  scheme.validate(n);
  MomentReport r;
  const double nn = static_cast<double>(n);
  switch (scheme.kind) {
    case WeightSchemeKind::Multinomial: {
      const double m = static_cast<double>(scheme.resolve_m(n));
      const double p = 1.0 / nn;
      r.mean_w1 = m / nn;
      r.second_w1 = (m / nn) * (1.0 - 1.0 / nn + m / nn);
      r.cross_w1w2 = m * (m - 1.0) / (nn * nn);
      r.l21_ratio = r.second_w1 / r.mean_w1;
      r.correlation_ratio = (m - 1.0) / m;
      r.adjusted_mixed = -1.0 / m;
      r.central2 = m * p * (1.0 - p);
      r.central4 = m * p * (1.0 - p) * (1.0 + 3.0 * (m - 2.0) * p * (1.0 - p));
      break;
    }
    case WeightSchemeKind::WithoutReplacement: {
      const double m = static_cast<double>(scheme.resolve_m(n));
      const double p = m / nn;
      r.mean_w1 = p;
      r.second_w1 = p;
      r.cross_w1w2 = m * (m - 1.0) / (nn * (nn - 1.0));
      r.l21_ratio = 1.0;
      r.correlation_ratio = n == 1 ? 1.0 : nn * (m - 1.0) / (m * (nn - 1.0));
      r.adjusted_mixed = n == 1 ? 0.0 : -(nn - m) / (m * (nn - 1.0));
      r.central2 = p * (1.0 - p);
      const double q = 1.0 - p;
      r.central4 = p * q * (p * p * p + q * q * q);
      break;
    }
    case WeightSchemeKind::WildPoisson:
      r.mean_w1 = 1.0;
      r.second_w1 = 2.0;
      r.cross_w1w2 = 1.0;
      r.l21_ratio = 2.0;
      r.correlation_ratio = 1.0;
      r.adjusted_mixed = 0.0;
      r.central2 = 1.0;
      r.central4 = 4.0;  // lambda + 3 lambda^2 at lambda = 1
      break;
    case WeightSchemeKind::WildLogNormal: {
      const double s2 = scheme.lognormal_sigma * scheme.lognormal_sigma;
      r.mean_w1 = 1.0;
      r.second_w1 = std::exp(s2);
      r.cross_w1w2 = 1.0;
      r.l21_ratio = r.second_w1;
      r.correlation_ratio = 1.0;
      r.adjusted_mixed = 0.0;
      r.central2 = std::exp(s2) - 1.0;
      r.central4 = std::exp(6.0 * s2) - 4.0 * std::exp(3.0 * s2) + 6.0 * std::exp(s2) - 3.0;
      break;
    }
  }
  return r;
}

double kappa_ratio(const WeightScheme& scheme, std::size_t n, double t) {
  scheme.validate(n);
  switch (scheme.kind) {
    case WeightSchemeKind::WithoutReplacement:
      return std::expm1(t);
    case WeightSchemeKind::Multinomial: {
      const double m = static_cast<double>(scheme.resolve_m(n));
      const double nn = static_cast<double>(n);
      const double kappa_m1 = std::expm1(m * std::log1p(std::expm1(t) / nn));
      return kappa_m1 / (m / nn);
    }
    case WeightSchemeKind::WildPoisson:
      return std::expm1(std::expm1(t));
    case WeightSchemeKind::WildLogNormal:
      if (t > 0.0) {
        throw std::domain_error("kappa_ratio: lognormal weights have no finite MGF for t > 0");
      }
      return lognormal_mgf(scheme.lognormal_sigma, t) - 1.0;
  }
  throw std::invalid_argument("kappa_ratio: unknown scheme");
}

double multinomial_kappa_limit_bound(double t) {
  const double a = std::abs(t);
  return t + 0.5 * t * t * std::exp(a + std::expm1(a)) * (1.0 + std::exp(a));
}

EmpiricalMoments empirical_moments(const WeightScheme& scheme, std::size_t n, std::size_t reps,
                                   std::uint64_t seed) {
  if (reps < 1) throw std::invalid_argument("empirical_moments: reps must be >= 1");
  scheme.validate(n);
  const MomentReport analytic = analytic_moments(scheme, n);
  const double mu = analytic.mean_w1;
  const double nn = static_cast<double>(n);

  // Per-replication statistics: a = mean w, b = mean w^2, c = pair mean of
  // w_i w_j, g = pair mean of (w~ - 1)(w~ - 1), v2/v4 = central moments
  // about the analytic mean.
  double sa = 0, sb = 0, sc = 0, sg = 0, sv2 = 0, sv4 = 0;
  double saa = 0, sbb = 0, scc = 0, sgg = 0, sv22 = 0, sv44 = 0;
  double sab = 0, sac = 0;

  Rng rng(seed);
  for (std::size_t r = 0; r < reps; ++r) {
    const WeightVector wv = draw_weights(scheme, n, rng);
    double sw = 0, sw2 = 0, sd1 = 0, sd2 = 0, sc2 = 0, sc4 = 0;
    for (double w : wv.w) {
      sw += w;
      sw2 += w * w;
      const double adj = w / mu - 1.0;
      sd1 += adj;
      sd2 += adj * adj;
      const double c = w - mu;
      sc2 += c * c;
      sc4 += c * c * c * c;
    }
    const double a = sw / nn;
    const double b = sw2 / nn;
    const double c = n > 1 ? (sw * sw - sw2) / (nn * (nn - 1.0)) : 0.0;
    const double g = n > 1 ? (sd1 * sd1 - sd2) / (nn * (nn - 1.0)) : 0.0;
    const double v2 = sc2 / nn;
    const double v4 = sc4 / nn;

    sa += a;
    sb += b;
    sc += c;
    sg += g;
    sv2 += v2;
    sv4 += v4;
    saa += a * a;
    sbb += b * b;
    scc += c * c;
    sgg += g * g;
    sv22 += v2 * v2;
    sv44 += v4 * v4;
    sab += a * b;
    sac += a * c;
  }

  const double R = static_cast<double>(reps);
  const double ma = sa / R, mb = sb / R, mc = sc / R, mg = sg / R;
  const double m2 = sv2 / R, m4 = sv4 / R;
  auto var_of = [&](double sum, double sumsq) {
    const double v = sumsq / R - (sum / R) * (sum / R);
    return v > 0.0 ? v : 0.0;
  };
  const double va = var_of(sa, saa), vb = var_of(sb, sbb), vc = var_of(sc, scc);
  const double vg = var_of(sg, sgg), v2v = var_of(sv2, sv22), v4v = var_of(sv4, sv44);
  const double cab = sab / R - ma * mb;
  const double cac = sac / R - ma * mc;

  EmpiricalMoments out;
  out.reps = reps;
  out.value.mean_w1 = ma;
  out.value.second_w1 = mb;
  out.value.cross_w1w2 = mc;
  out.value.l21_ratio = mb / ma;
  out.value.correlation_ratio = mc / (ma * ma);
  out.value.adjusted_mixed = mg;
  out.value.central2 = m2;
  out.value.central4 = m4;

  out.std_err.mean_w1 = std::sqrt(va / R);
  out.std_err.second_w1 = std::sqrt(vb / R);
  out.std_err.cross_w1w2 = std::sqrt(vc / R);
  out.std_err.adjusted_mixed = std::sqrt(vg / R);
  out.std_err.central2 = std::sqrt(v2v / R);
  out.std_err.central4 = std::sqrt(v4v / R);

  // Delta method for the two ratio fields.
  const double l21_var = vb / (ma * ma) + mb * mb * va / (ma * ma * ma * ma) -
                         2.0 * mb * cab / (ma * ma * ma);
  const double corr_var = vc / std::pow(ma, 4) + 4.0 * mc * mc * va / std::pow(ma, 6) -
                          4.0 * mc * cac / std::pow(ma, 5);
  out.std_err.l21_ratio = std::sqrt(std::max(0.0, l21_var) / R);
  out.std_err.correlation_ratio = std::sqrt(std::max(0.0, corr_var) / R);
  return out;
}

}  // namespace honest_forest
