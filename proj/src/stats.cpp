#include "mitrust/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "mitrust/errors.hpp"

namespace mitrust {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

// log(1 + exp(eta)) without overflow.
double log1pexp(double eta) {
  if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

ProportionTestResult prop_test_2x2(const ContingencyTable2x2& t,
                                   bool continuity) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0)
    throw Error(ErrorKind::domain, "contingency counts must be non-negative");
  const std::int64_t row1 = t.a + t.b;
  const std::int64_t row2 = t.c + t.d;
  if (row1 == 0 || row2 == 0)
    throw Error(ErrorKind::domain, "both row sums must be positive");

  ProportionTestResult result;
  result.corrected = continuity;
  result.p1_hat = static_cast<double>(t.a) / static_cast<double>(row1);
  result.p2_hat = static_cast<double>(t.c) / static_cast<double>(row2);

  const std::int64_t col1 = t.a + t.c;
  const std::int64_t col2 = t.b + t.d;
  if (col1 == 0 || col2 == 0) {
    result.chi2 = 0.0;
    result.p_two_tailed = 1.0;
    return result;
  }

  const double n = static_cast<double>(row1 + row2);
  const double cross = std::abs(static_cast<double>(t.a) * t.d -
                                static_cast<double>(t.b) * t.c);
  // Yates correction clamps at zero so near-null tables cannot flip sign.
  const double adjusted =
      continuity ? std::max(0.0, cross - n / 2.0) : cross;
  const double denom = static_cast<double>(row1) * row2 * col1 * col2;
  result.chi2 = n * adjusted * adjusted / denom;
  result.p_two_tailed = chi2_sf_df1(result.chi2);
  return result;
}

double chi2_sf_df1(double x) {
  if (x < 0.0)
    throw Error(ErrorKind::domain, "chi-square statistic must be >= 0");
  return std::erfc(std::sqrt(x / 2.0));
}

double logistic_log_lik(double beta0, double beta1, std::span<const double> x,
                        std::span<const int> y) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double eta = beta0 + beta1 * x[i];
    ll += y[i] * eta - log1pexp(eta);
  }
  return ll;
}

std::pair<double, double> logistic_gradient(double beta0, double beta1,
                                            std::span<const double> x,
                                            std::span<const int> y) {
  double g0 = 0.0, g1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double resid = y[i] - sigmoid(beta0 + beta1 * x[i]);
    g0 += resid;
    g1 += resid * x[i];
  }
  return {g0, g1};
}

namespace {

// Perfect or quasi separation on one regressor: some threshold on x splits
// the outcome classes with at most boundary contact.
bool is_separated(std::span<const double> x, std::span<const int> y) {
  double max0 = -std::numeric_limits<double>::infinity();
  double min0 = std::numeric_limits<double>::infinity();
  double max1 = -std::numeric_limits<double>::infinity();
  double min1 = std::numeric_limits<double>::infinity();
  bool any0 = false, any1 = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] == 1) {
      any1 = true;
      max1 = std::max(max1, x[i]);
      min1 = std::min(min1, x[i]);
    } else {
      any0 = true;
      max0 = std::max(max0, x[i]);
      min0 = std::min(min0, x[i]);
    }
  }
  if (!any0 || !any1) return true;  // all outcomes identical
  return max0 <= min1 || max1 <= min0;
}

struct Irls2x2 {
  double h00, h01, h11;  // information matrix
  bool solve(double g0, double g1, double& d0, double& d1) const {
    const double det = h00 * h11 - h01 * h01;
    if (!std::isfinite(det) || std::abs(det) < 1e-300) return false;
    d0 = (h11 * g0 - h01 * g1) / det;
    d1 = (h00 * g1 - h01 * g0) / det;
    return true;
  }
};

}  // namespace

LogisticFit fit_logistic(std::span<const double> x, std::span<const int> y,
                         const LogisticOptions& options) {
  if (x.size() != y.size())
    throw Error(ErrorKind::domain, "x and y must have equal length");
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::domain, "need at least two observations");
  for (int v : y) {
    if (v != 0 && v != 1)
      throw Error(ErrorKind::domain, "outcomes must be 0 or 1");
  }

  // Standardize the regressor for conditioning; estimates map back below.
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) /
                      static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);

  const bool intercept_only = options.intercept_only;
  if (sd == 0.0 && !intercept_only)
    throw Error(ErrorKind::domain,
                "constant regressor; request an intercept-only fit");

  std::vector<double> z(n, 0.0);
  if (!intercept_only) {
    for (std::size_t i = 0; i < n; ++i) z[i] = (x[i] - mean) / sd;
  }

  LogisticFit fit;
  fit.separation_flag = !intercept_only && is_separated(x, y);
  if (intercept_only) {
    const bool any0 = std::any_of(y.begin(), y.end(), [](int v) { return v == 0; });
    const bool any1 = std::any_of(y.begin(), y.end(), [](int v) { return v == 1; });
    fit.separation_flag = !(any0 && any1);
  }

  double b0 = 0.0, b1 = 0.0;
  double ll = logistic_log_lik(b0, b1, z, y);
  bool capped = false;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    fit.iterations = iter;
    auto [g0, g1] = logistic_gradient(b0, b1, z, y);
    Irls2x2 info{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(b0 + b1 * z[i]);
      const double w = p * (1.0 - p);
      info.h00 += w;
      info.h01 += w * z[i];
      info.h11 += w * z[i] * z[i];
    }
    if (intercept_only) {
      info.h01 = 0.0;
      info.h11 = 1.0;  // placeholder; slope stays at zero
      g1 = 0.0;
    }

    double d0 = 0.0, d1 = 0.0;
    if (!info.solve(g0, g1, d0, d1)) {
      fit.separation_flag = true;
      break;
    }

    // Step-halving: shrink the Newton step until the likelihood improves.
    double t = 1.0;
    double next0 = b0, next1 = b1, next_ll = ll;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_step_halvings; ++halving) {
      const double c0 = b0 + t * d0;
      const double c1 = b1 + t * d1;
      const double cll = logistic_log_lik(c0, c1, z, y);
      if (cll >= ll || halving == options.max_step_halvings) {
        next0 = c0;
        next1 = c1;
        next_ll = cll;
        accepted = cll >= ll;
        break;
      }
      t /= 2.0;
    }

    const double delta_ll = std::abs(next_ll - ll);
    b0 = next0;
    b1 = next1;
    ll = next_ll;

    if (std::abs(b0) > options.divergence_bound ||
        std::abs(b1) > options.divergence_bound) {
      fit.separation_flag = true;
      b0 = std::clamp(b0, -options.divergence_bound, options.divergence_bound);
      b1 = std::clamp(b1, -options.divergence_bound, options.divergence_bound);
      ll = logistic_log_lik(b0, b1, z, y);
      capped = true;
      break;
    }

    if (accepted && delta_ll <= options.tol) {
      fit.converged = true;
      break;
    }
  }

  // Wald covariance from the inverse information at the solution.
  double h00 = 0.0, h01 = 0.0, h11 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = sigmoid(b0 + b1 * z[i]);
    const double w = p * (1.0 - p);
    h00 += w;
    h01 += w * z[i];
    h11 += w * z[i] * z[i];
  }

  double v00 = kNaN, v01 = kNaN, v11 = kNaN;
  if (intercept_only) {
    if (h00 > 0.0) v00 = 1.0 / h00;
  } else {
    const double det = h00 * h11 - h01 * h01;
    if (std::isfinite(det) && det > 0.0) {
      v00 = h11 / det;
      v01 = -h01 / det;
      v11 = h00 / det;
    }
  }

  if (intercept_only) {
    fit.beta0 = b0;
    fit.beta1 = 0.0;
    fit.se0 = std::sqrt(v00);
    fit.se1 = kNaN;
    fit.z1 = kNaN;
    fit.p1 = kNaN;
    fit.log_lik = ll;
    if (capped) fit.converged = false;
    return fit;
  }

  // Map (b0, b1) on the standardized scale back to the original scale:
  // eta = b0 + b1 (x - m)/s  =  (b0 - b1 m/s) + (b1/s) x.
  fit.beta0 = b0 - b1 * mean / sd;
  fit.beta1 = b1 / sd;
  const double j01 = -mean / sd;  // d beta0 / d b1
  const double var0 = v00 + 2.0 * j01 * v01 + j01 * j01 * v11;
  const double var1 = v11 / (sd * sd);
  fit.se0 = var0 > 0.0 ? std::sqrt(var0) : kNaN;
  fit.se1 = var1 > 0.0 ? std::sqrt(var1) : kNaN;
  fit.z1 = fit.beta1 / fit.se1;
  fit.p1 = std::isfinite(fit.z1)
               ? std::erfc(std::abs(fit.z1) / std::sqrt(2.0))
               : kNaN;
  fit.log_lik = ll;
  if (capped) fit.converged = false;
  return fit;
}

ConditionCounts tabulate(const std::vector<TrialRecord>& records) {
  ConditionCounts counts;
  for (const TrialRecord& r : records) {
    ChoiceCounts& row = counts[r.condition];
    switch (r.choice) {
      case ChoiceLabel::A: ++row.a; break;
      case ChoiceLabel::B: ++row.b; break;
      case ChoiceLabel::NA: ++row.na; break;
    }
  }
  return counts;
}

std::optional<double> published_chi2(Wave wave, Task task) {
  if (wave == Wave::wave1)
    return task == Task::trust_game ? 108.25 : 8.49;
  return task == Task::trust_game ? 8.49 : 1.35;
}

AnalysisReport analyze(const std::vector<TrialRecord>& records, Wave wave) {
  AnalysisReport report;
  report.wave = wave;

  const ConditionCounts counts = tabulate(records);
  for (const Condition& condition : wave_conditions(wave)) {
    const std::string label = condition_label(condition);
    if (!counts.contains(label))
      throw Error(ErrorKind::domain, "no records for condition " + label);
  }

  for (Task task : {Task::trust_game, Task::non_social}) {
    const Condition hyp{task, Incentive::hypothetical, wave};
    const Condition inc{task, Incentive::real, wave};
    const ChoiceCounts& h = counts.at(condition_label(hyp));
    const ChoiceCounts& i = counts.at(condition_label(inc));

    ProportionComparison cmp;
    cmp.name = condition_label(hyp) + "_vs_incentivized";
    // NA responses fold into "not A": the comparison is about choosing A.
    cmp.table = {h.a, h.total() - h.a, i.a, i.total() - i.a};
    cmp.result = prop_test_2x2(cmp.table, true);
    cmp.published_chi2 = published_chi2(wave, task);
    if (cmp.published_chi2 &&
        std::abs(cmp.result.chi2 - *cmp.published_chi2) > 0.01) {
      std::string note =
          cmp.name + ": computed chi2 = " +
          format_double("%.2f", cmp.result.chi2) + " (p = " +
          format_double("%.4g", cmp.result.p_two_tailed) +
          ") disagrees with the originally reported chi2 = " +
          format_double("%.2f", *cmp.published_chi2) +
          "; the reported value is inconsistent with the published "
          "per-condition counts" +
          (cmp.result.p_two_tailed < 0.001
               ? ", and the directional conclusion (p < 0.001) holds either "
                 "way."
               : ".");
      cmp.note = note;
      report.notes.push_back(std::move(note));
    }
    report.tests.push_back(std::move(cmp));
  }

  for (const Condition& condition : wave_conditions(wave)) {
    const std::string label = condition_label(condition);
    std::vector<double> x;
    std::vector<int> y;
    for (const TrialRecord& r : records) {
      if (r.condition != label) continue;
      x.push_back(static_cast<double>(r.endowment_cents) / 100.0);
      y.push_back(r.choice == ChoiceLabel::A ? 1 : 0);
    }
    ConditionFit cf;
    cf.condition = label;
    cf.fit = fit_logistic(x, y);
    cf.estimable = !cf.fit.separation_flag;
    if (!cf.estimable) {
      report.notes.push_back(
          label +
          ": logistic fit is not estimable (separated or degenerate "
          "outcomes); no slope is reported.");
    }
    report.fits.push_back(std::move(cf));
  }

  return report;
}

}  // namespace mitrust
