#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mmdec::analysis {

// Alternative hypothesis: two-sided, statistic below / above its null value.
enum class Tails { Two, Less, Greater };

std::string to_string(Tails tails);

struct StatsResult {
  std::string test;
  double statistic = 0.0;  // R for Pearson, t for t-tests
  double p_value = 1.0;
  double df = 0.0;
  Tails tails = Tails::Two;
  bool paired = false;
};

// Pearson's R with the p-value of t = R sqrt((n - 2) / (1 - R^2)) on n - 2
// degrees of freedom. Requires n >= 3 and non-constant inputs.
StatsResult pearson_corr(const std::vector<double>& x, const std::vector<double>& y, Tails tails = Tails::Two);

// Student t-test of mean(a) - mean(b): paired on differences, otherwise with
// pooled variance.
StatsResult t_test(const std::vector<double>& a, const std::vector<double>& b, bool paired, Tails tails = Tails::Two);

double mean(const std::vector<double>& x);
// Sample standard deviation (n - 1 denominator).
double stddev(const std::vector<double>& x);

// Half-width of the t-based confidence interval of the mean; 0 for n < 2.
double t_interval_margin(const std::vector<double>& x, double level = 0.95);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Accuracy interval of a random binary classifier on n examples: the
// (1 - level)/2 and (1 + level)/2 quantiles of Binomial(n, 0.5), over n.
Interval random_classifier_interval(std::size_t n, double level = 0.95);

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double r = 0.0;
  double p_value = 1.0;
  Tails tails = Tails::Less;
};

// Least-squares line accuracy = intercept + slope * pitch, with a Pearson
// test of the stated tail (single-tailed, negative by default).
Regression pitch_accuracy_regression(const std::vector<double>& pitch_hz, const std::vector<double>& accuracy,
                                     Tails tails = Tails::Less);

}  // namespace mmdec::analysis
