#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mitrust/protocol.hpp"
#include "mitrust/records.hpp"

namespace mitrust {

// Inferential toolkit: 2x2 proportion tests with clamped Yates correction,
// the chi-square (df=1) survival function, and binary logistic regression
// fitted by iteratively reweighted least squares with Wald inference and
// separation diagnostics.

// Row 1 = group 1 (successes a, failures b); row 2 = group 2 (c, d).
struct ContingencyTable2x2 {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;
};

struct ProportionTestResult {
  double chi2 = 0.0;
  int df = 1;
  double p_two_tailed = 1.0;
  double p1_hat = 0.0;
  double p2_hat = 0.0;
  bool corrected = true;
};

// chi2 = N * (max(0, |ad - bc| - N/2))^2 / ((a+b)(c+d)(a+c)(b+d)); the
// N/2 term is dropped when continuity is false. A zero column sum gives
// chi2 = 0, p = 1. A zero row sum is a domain error.
ProportionTestResult prop_test_2x2(const ContingencyTable2x2& table,
                                   bool continuity = true);

// Upper tail of the chi-square distribution with one degree of freedom:
// p = erfc(sqrt(x/2)).
double chi2_sf_df1(double x);

struct LogisticOptions {
  int max_iterations = 100;
  double tol = 1e-10;          // stop on log-likelihood change <= tol
  int max_step_halvings = 10;  // per iteration
  double divergence_bound = 15.0;  // |beta| on the standardized scale
  bool intercept_only = false;
};

struct LogisticFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double se0 = 0.0;
  double se1 = 0.0;
  double z1 = 0.0;
  double p1 = 1.0;
  double log_lik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool separation_flag = false;
};

// Maximizes the Bernoulli log-likelihood of logit(P(y=1)) = beta0 + beta1*x
// by IRLS with step-halving; x is standardized internally for conditioning
// and the estimates are mapped back. Wald standard errors come from the
// inverse observed information. Degenerate data (all y identical, perfect
// or quasi-separation, runaway coefficients) set separation_flag instead of
// crashing.
LogisticFit fit_logistic(std::span<const double> x, std::span<const int> y,
                         const LogisticOptions& options = {});

// Bernoulli log-likelihood and its gradient at (beta0, beta1), exposed for
// diagnostics and cross-checks.
double logistic_log_lik(double beta0, double beta1, std::span<const double> x,
                        std::span<const int> y);
std::pair<double, double> logistic_gradient(double beta0, double beta1,
                                            std::span<const double> x,
                                            std::span<const int> y);

struct ChoiceCounts {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t na = 0;

  std::int64_t total() const { return a + b + na; }
};

// Per-condition counts of A / B / NA, keyed by condition label.
using ConditionCounts = std::map<std::string, ChoiceCounts>;

ConditionCounts tabulate(const std::vector<TrialRecord>& records);

struct ProportionComparison {
  std::string name;  // e.g. "w1_trust_hypothetical_vs_incentivized"
  ContingencyTable2x2 table;
  ProportionTestResult result;
  std::optional<double> published_chi2;  // the original study's statistic
  std::optional<std::string> note;       // set when the two disagree
};

struct ConditionFit {
  std::string condition;
  LogisticFit fit;
  bool estimable = true;
};

struct AnalysisReport {
  Wave wave{};
  std::vector<ProportionComparison> tests;
  std::vector<ConditionFit> fits;
  std::vector<std::string> notes;
};

// Runs the wave's full battery: trust hypothetical-vs-incentivized and
// non-social hypothetical-vs-incentivized proportion tests (NA folded into
// "not A"; that convention reproduces the original statistics), plus one
// logistic fit of the A-indicator on the stake in dollars per condition.
// Throws a domain error naming any missing condition.
AnalysisReport analyze(const std::vector<TrialRecord>& records, Wave wave);

// Statistic the original study reported for a comparison, if any.
std::optional<double> published_chi2(Wave wave, Task task);

}  // namespace mitrust
