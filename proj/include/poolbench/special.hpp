#pragma once

// Distribution functions needed by the power analysis and Tukey HSD routines.
// Elementary special functions (incomplete beta, log-gamma, erfc, t quantiles)
// come from Boost.Math; the noncentral t series and the studentized range
// quadrature are implemented here.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "poolbench/error.hpp"

namespace poolbench::special {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

inline double t_cdf(double x, double df) {
  if (!(df > 0)) throw StatsError("t distribution needs df > 0");
  return boost::math::cdf(boost::math::students_t_distribution<double>(df), x);
}

inline double t_quantile(double p, double df) {
  if (!(df > 0)) throw StatsError("t distribution needs df > 0");
  return boost::math::quantile(boost::math::students_t_distribution<double>(df), p);
}

namespace detail {

// F(t; df, ncp) for t >= 0 as the Poisson mixture
//   Phi(-ncp) + 1/2 sum_j [ p_j I_x(j + 1/2, df/2) + q_j I_x(j + 1, df/2) ],
//   x = t^2 / (t^2 + df),  p_j = e^{-l} l^j / j!,  q_j = ncp e^{-l} l^j / (sqrt 2 Gamma(j + 3/2)),
// with l = ncp^2 / 2. Summation starts at the Poisson mode and walks outward, so
// weights are computed in log space and large |ncp| does not underflow.
inline double nct_cdf_nonnegative(double t, double df, double ncp) {
  const double base = normal_cdf(-ncp);
  if (t == 0.0) return base;
  const double x = t * t / (t * t + df);
  const double half_df = 0.5 * df;
  const double lam = 0.5 * ncp * ncp;
  if (lam == 0.0) return base + 0.5 * boost::math::ibeta(0.5, half_df, x);

  const double log_lam = std::log(lam);
  const double log_abs_ncp = std::log(std::abs(ncp));
  const double sign = ncp < 0 ? -1.0 : 1.0;
  auto term = [&](double j) {
    const double log_w = -lam + j * log_lam;
    const double p = std::exp(log_w - std::lgamma(j + 1.0));
    const double q = sign * std::exp(log_w + log_abs_ncp - 0.5 * std::log(2.0) - std::lgamma(j + 1.5));
    double s = 0.0;
    if (p > 0) s += p * boost::math::ibeta(j + 0.5, half_df, x);
    if (q != 0) s += q * boost::math::ibeta(j + 1.0, half_df, x);
    return std::pair{s, std::abs(p) + std::abs(q)};
  };

  constexpr double kTol = 1e-16;
  constexpr int kMaxTerms = 200000;
  const double mode = std::floor(lam);
  double sum = 0.0;
  // forward from the mode
  for (int i = 0; i < kMaxTerms; ++i) {
    const double j = mode + i;
    auto [s, w] = term(j);
    sum += s;
    if (j > lam && w < kTol) break;
    if (i + 1 == kMaxTerms) throw StatsError("noncentral t series did not converge");
  }
  // backward from the mode
  for (double j = mode - 1; j >= 0; j -= 1.0) {
    auto [s, w] = term(j);
    sum += s;
    if (w < kTol) break;
  }
  return base + 0.5 * sum;
}

}  // namespace detail

/// P(T' <= x) for the noncentral t distribution with `df` degrees of freedom.
inline double noncentral_t_cdf(double x, double df, double ncp) {
  if (!(df > 0)) throw StatsError("noncentral t needs df > 0");
  if (!std::isfinite(ncp)) throw StatsError("noncentral t needs a finite noncentrality");
  double p = x >= 0 ? detail::nct_cdf_nonnegative(x, df, ncp) : 1.0 - detail::nct_cdf_nonnegative(-x, df, -ncp);
  return std::clamp(p, 0.0, 1.0);
}

namespace detail {

// P(range of k normals > 12) < k^2 * 1e-17: treated as zero.
inline constexpr double kRangeCutoff = 12.0;

/// Composite 20-point Gauss-Legendre rule over [a, b] split into panels of at most `width`.
template <typename F>
double panel_integral(F&& f, double a, double b, double width) {
  if (!(b > a)) return 0.0;
  const auto panels = static_cast<int>(std::ceil((b - a) / width));
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    sum += boost::math::quadrature::gauss<double, 20>::integrate(f, a + i * h, a + (i + 1) * h);
  }
  return sum;
}

/// Phi(z) - Phi(z - w) for w >= 0, computed in whichever tail keeps precision.
inline double normal_interval(double z, double w) {
  if (z > 0) return normal_cdf(-(z - w)) - normal_cdf(-z);
  return normal_cdf(z) - normal_cdf(z - w);
}

// Upper tail of the range of k iid standard normals:
//   1 - W(w) = k * integral phi(z) [ Phi(z)^{k-1} - (Phi(z) - Phi(z - w))^{k-1} ] dz.
inline double range_sf(double w, int k) {
  if (w <= 0) return 1.0;
  if (w > kRangeCutoff) return 0.0;
  const double km1 = k - 1;
  auto f = [&](double z) {
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return phi * (std::pow(normal_cdf(z), km1) - std::pow(normal_interval(z, w), km1));
  };
  return std::clamp(k * panel_integral(f, -8.5, 8.5 + w, 1.0), 0.0, 1.0);
}

}  // namespace detail

/// Upper tail P(Q > q) of the studentized range with k means and df error degrees
/// of freedom. df = +infinity gives the normal-range limit.
inline double studentized_range_sf(double q, int k, double df) {
  if (k < 2) throw StatsError("studentized range needs k >= 2");
  if (!(df >= 1)) throw StatsError("studentized range needs df >= 1");
  if (q <= 0) return 1.0;
  if (std::isinf(df)) return detail::range_sf(q, k);

  // s = sqrt(chi2_df / df); density in log form
  const double log_norm = 0.5 * df * std::log(df) - std::lgamma(0.5 * df) - (0.5 * df - 1.0) * std::log(2.0);
  auto f = [&](double s) {
    if (s <= 0) return 0.0;
    const double log_fs = log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s;
    return std::exp(log_fs) * detail::range_sf(q * s, k);
  };
  const double spread = 1.0 / std::sqrt(2.0 * df);
  const double lo = std::max(0.0, 1.0 - 14.0 * spread);
  // heavy right tail for small df; range_sf vanishes beyond the cutoff
  double hi = df < 30 ? std::max(1.0 + 14.0 * spread, 12.0 + 60.0 / df) : 1.0 + 14.0 * spread;
  hi = std::min(hi, detail::kRangeCutoff / q);
  const double width = std::min(spread, 0.25);
  if (hi <= lo) return 0.0;
  if (hi <= 1.0) return std::clamp(detail::panel_integral(f, lo, hi, width), 0.0, 1.0);
  const double v = detail::panel_integral(f, lo, 1.0, width) + detail::panel_integral(f, 1.0, hi, width);
  return std::clamp(v, 0.0, 1.0);
}

/// P(Q <= q; k, df).
inline double studentized_range_cdf(double q, int k, double df) { return 1.0 - studentized_range_sf(q, k, df); }

}  // namespace poolbench::special
