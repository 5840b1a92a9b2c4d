#include "mmdec/analysis/stats.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "mmdec/common/error.hpp"

namespace mmdec::analysis {

std::string to_string(Tails tails) {
  switch (tails) {
    case Tails::Two: return "two-sided";
    case Tails::Less: return "less";
    case Tails::Greater: return "greater";
  }
  return "unknown";
}

namespace {

void require_finite(const std::vector<double>& x, const char* what) {
  for (const double v : x)
    if (!std::isfinite(v)) throw Error(std::string(what) + ": non-finite input");
}

double t_p_value(double t, double df, Tails tails) {
  if (std::isinf(t)) {
    const bool positive = t > 0.0;
    switch (tails) {
      case Tails::Two: return 0.0;
      case Tails::Greater: return positive ? 0.0 : 1.0;
      case Tails::Less: return positive ? 1.0 : 0.0;
    }
  }
  const boost::math::students_t dist(df);
  switch (tails) {
    case Tails::Two: return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    case Tails::Greater: return boost::math::cdf(boost::math::complement(dist, t));
    case Tails::Less: return boost::math::cdf(dist, t);
  }
  return 1.0;
}

}  // namespace

double mean(const std::vector<double>& x) {
  if (x.empty()) throw Error("mean: empty input");
  double s = 0.0;
  for (const double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double stddev(const std::vector<double>& x) {
  if (x.size() < 2) throw Error("stddev: need at least two values");
  const double m = mean(x);
  double s = 0.0;
  for (const double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

StatsResult pearson_corr(const std::vector<double>& x, const std::vector<double>& y, Tails tails) {
  if (x.size() != y.size()) throw Error("pearson_corr: inputs differ in length");
  if (x.size() < 3) throw Error("pearson_corr: need at least 3 points");
  require_finite(x, "pearson_corr");
  require_finite(y, "pearson_corr");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("pearson_corr: zero variance input");
  StatsResult r;
  r.test = "pearson (t approximation)";
  r.statistic = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  r.df = static_cast<double>(x.size() - 2);
  r.tails = tails;
  const double denom = 1.0 - r.statistic * r.statistic;
  const double t = denom <= 0.0 ? std::copysign(std::numeric_limits<double>::infinity(), r.statistic)
                                : r.statistic * std::sqrt(r.df / denom);
  r.p_value = t_p_value(t, r.df, tails);
  return r;
}

StatsResult t_test(const std::vector<double>& a, const std::vector<double>& b, bool paired, Tails tails) {
  require_finite(a, "t_test");
  require_finite(b, "t_test");
  StatsResult r;
  r.tails = tails;
  r.paired = paired;
  double t = 0.0;
  if (paired) {
    if (a.size() != b.size()) throw Error("t_test: paired samples differ in length");
    if (a.size() < 2) throw Error("t_test: need at least 2 pairs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double sd = stddev(d);
    if (sd == 0.0) throw Error("t_test: zero variance of differences");
    t = mean(d) / (sd / std::sqrt(static_cast<double>(d.size())));
    r.df = static_cast<double>(d.size() - 1);
    r.test = "paired t";
  } else {
    if (a.size() < 2 || b.size() < 2) throw Error("t_test: need at least 2 values per group");
    const double ma = mean(a), mb = mean(b);
    double ss = 0.0;
    for (const double v : a) ss += (v - ma) * (v - ma);
    for (const double v : b) ss += (v - mb) * (v - mb);
    r.df = static_cast<double>(a.size() + b.size() - 2);
    const double se = std::sqrt(ss / r.df * (1.0 / static_cast<double>(a.size()) + 1.0 / static_cast<double>(b.size())));
    if (se == 0.0) throw Error("t_test: zero variance input");
    t = (ma - mb) / se;
    r.test = "unpaired t";
  }
  r.statistic = t;
  r.p_value = t_p_value(t, r.df, tails);
  return r;
}

double t_interval_margin(const std::vector<double>& x, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error("t_interval_margin: level must lie in (0, 1)");
  if (x.size() < 2) return 0.0;
  const boost::math::students_t dist(static_cast<double>(x.size() - 1));
  const double q = boost::math::quantile(dist, 0.5 + level / 2.0);
  return q * stddev(x) / std::sqrt(static_cast<double>(x.size()));
}

Interval random_classifier_interval(std::size_t n, double level) {
  if (n == 0) throw Error("random_classifier_interval: need at least one example");
  if (!(level > 0.0 && level < 1.0)) throw Error("random_classifier_interval: level must lie in (0, 1)");
  const boost::math::binomial dist(static_cast<double>(n), 0.5);
  // Smallest k with P(X <= k) >= q.
  const auto quantile = [&](double q) {
    for (std::size_t k = 0; k <= n; ++k) {
      if (boost::math::cdf(dist, static_cast<double>(k)) >= q) return static_cast<double>(k);
    }
    return static_cast<double>(n);
  };
  const double alpha = (1.0 - level) / 2.0;
  return {quantile(alpha) / static_cast<double>(n), quantile(1.0 - alpha) / static_cast<double>(n)};
}

Regression pitch_accuracy_regression(const std::vector<double>& pitch_hz, const std::vector<double>& accuracy,
                                     Tails tails) {
  if (pitch_hz.size() != accuracy.size()) throw Error("pitch_accuracy_regression: inputs differ in length");
  if (pitch_hz.size() < 3) throw Error("pitch_accuracy_regression: need at least 3 stories");
  const double mx = mean(pitch_hz), my = mean(accuracy);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < pitch_hz.size(); ++i) {
    sxy += (pitch_hz[i] - mx) * (accuracy[i] - my);
    sxx += (pitch_hz[i] - mx) * (pitch_hz[i] - mx);
  }
  if (sxx == 0.0) throw Error("pitch_accuracy_regression: constant pitch");
  Regression reg;
  reg.slope = sxy / sxx;
  reg.intercept = my - reg.slope * mx;
  reg.tails = tails;
  bool constant_accuracy = true;
  for (const double a : accuracy) constant_accuracy = constant_accuracy && a == accuracy[0];
  if (!constant_accuracy) {
    const auto test = pearson_corr(pitch_hz, accuracy, tails);
    reg.r = test.statistic;
    reg.p_value = test.p_value;
  }
  return reg;
}

}  // namespace mmdec::analysis
