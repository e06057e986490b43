#pragma once

// Independent reference implementations used only by tests. Each oracle
// takes a different computational route from the library code it checks:
// the survival function goes through the regularized incomplete gamma
// function, the proportion test through explicit expected counts, rounding
// through exact integer arithmetic, and the logistic MLE through grid
// search over the likelihood surface.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracle {

// ---- chi-square survival function via incomplete gamma ----

inline double gammln(double xx) {
  static const double cof[6] = {76.18009172947146,  -86.50532032941677,
                                24.01409824083091,  -1.231739572450155,
                                0.1208650973866179e-2, -0.5395239384953e-5};
  double x = xx, y = xx;
  double tmp = x + 5.5;
  tmp -= (x + 0.5) * std::log(tmp);
  double ser = 1.000000000190015;
  for (int j = 0; j < 6; ++j) ser += cof[j] / ++y;
  return -tmp + std::log(2.5066282746310005 * ser / x);
}

// Regularized lower incomplete gamma P(a, x) by series expansion.
inline double gamma_p_series(double a, double x) {
  const double gln = gammln(a);
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 1; n <= 500; ++n) {
    ++ap;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - gln);
    }
  }
  throw std::runtime_error("gamma series did not converge");
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction.
inline double gamma_q_cf(double a, double x) {
  const double gln = gammln(a);
  const double fpmin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) {
      return std::exp(-x + a * std::log(x) - gln) * h;
    }
  }
  throw std::runtime_error("gamma continued fraction did not converge");
}

inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::runtime_error("bad gamma_q args");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

// P(X > x) for X ~ chi-square with one degree of freedom.
inline double chi2_sf_df1(double x) { return gamma_q(0.5, x / 2.0); }

// ---- proportion test via expected counts ----

// Pearson statistic sum((O-E)^2 / E), with optional Yates correction
// applied as |O-E| -> max(0, |O-E| - 1/2) cell-wise (equivalent to the
// closed form on 2x2 tables).
inline double pearson_chi2_2x2(std::int64_t a, std::int64_t b, std::int64_t c,
                               std::int64_t d, bool yates) {
  const double row1 = static_cast<double>(a + b);
  const double row2 = static_cast<double>(c + d);
  const double col1 = static_cast<double>(a + c);
  const double col2 = static_cast<double>(b + d);
  const double n = row1 + row2;
  const double obs[4] = {static_cast<double>(a), static_cast<double>(b),
                         static_cast<double>(c), static_cast<double>(d)};
  const double exp_[4] = {row1 * col1 / n, row1 * col2 / n, row2 * col1 / n,
                          row2 * col2 / n};
  double chi2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    double dev = std::abs(obs[i] - exp_[i]);
    if (yates) dev = std::max(0.0, dev - 0.5);
    if (exp_[i] > 0.0) chi2 += dev * dev / exp_[i];
  }
  return chi2;
}

// ---- exact rounding on rationals ----

// round(value * num / den) half away from zero, in exact integer
// arithmetic. den must be positive.
inline std::int64_t round_half_away_rational(std::int64_t value,
                                             std::int64_t num,
                                             std::int64_t den) {
  const __int128 scaled = static_cast<__int128>(value) * num;
  const __int128 d = den;
  if (scaled >= 0) {
    return static_cast<std::int64_t>((2 * scaled + d) / (2 * d));
  }
  return -static_cast<std::int64_t>((2 * (-scaled) + d) / (2 * d));
}

// ---- percentile oracle ----

// Linear interpolation between order statistics at 1 + (n-1)p, computed in
// long double on a sorted copy.
inline long double percentile_interpolated(std::vector<std::int64_t> values,
                                           long double p) {
  if (values.empty()) throw std::runtime_error("empty percentile input");
  std::sort(values.begin(), values.end());
  const long double pos = p * static_cast<long double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const long double frac = pos - static_cast<long double>(lo);
  long double out = static_cast<long double>(values[lo]);
  if (frac > 0.0L && lo + 1 < values.size()) {
    out += frac * static_cast<long double>(values[lo + 1] - values[lo]);
  }
  return out;
}

// ---- logistic MLE by grid search ----

inline double bernoulli_log_lik(double b0, double b1,
                                const std::vector<double>& x,
                                const std::vector<int>& y) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double eta = b0 + b1 * x[i];
    const double log1pexp =
        eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
    ll += y[i] * eta - log1pexp;
  }
  return ll;
}

struct GridSearchResult {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double log_lik = 0.0;
};

// Coarse-to-fine maximization of the Bernoulli log-likelihood over
// (beta0, beta1). Five refinement stages from half-width 10 reach a final
// step of 5e-5, comfortably inside a 1e-3 agreement tolerance.
inline GridSearchResult logistic_mle_grid_search(const std::vector<double>& x,
                                                 const std::vector<int>& y) {
  GridSearchResult best{0.0, 0.0, bernoulli_log_lik(0.0, 0.0, x, y)};
  double half_width = 10.0;
  for (int stage = 0; stage < 6; ++stage) {
    const double step = half_width / 20.0;
    GridSearchResult stage_best = best;
    for (int i = -20; i <= 20; ++i) {
      for (int j = -20; j <= 20; ++j) {
        const double b0 = best.beta0 + i * step;
        const double b1 = best.beta1 + j * step;
        const double ll = bernoulli_log_lik(b0, b1, x, y);
        if (ll > stage_best.log_lik) stage_best = {b0, b1, ll};
      }
    }
    best = stage_best;
    half_width = 2.0 * step;
  }
  return best;
}

}  // namespace oracle
