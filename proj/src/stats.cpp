#include "tqm/stats.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tqm::stats {

namespace {

constexpr int kMaxIterations = 512;

double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("gamma shape parameter must be positive and finite");
  }
  if (std::isnan(x) || x < 0.0) {
    throw std::invalid_argument("gamma argument must be nonnegative");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_continued_fraction(a, x);
}

double chi_square_tail(double statistic, int degrees_of_freedom) {
  if (degrees_of_freedom < 1) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isnan(statistic) || statistic < 0.0) {
    throw std::invalid_argument("chi-square statistic must be nonnegative");
  }
  return regularized_gamma_q(0.5 * degrees_of_freedom, 0.5 * statistic);
}

GofReport chi_square(std::span<const std::uint64_t> observed,
                     std::span<const double> expected_probabilities, std::uint64_t total,
                     double alpha) {
  if (observed.size() != expected_probabilities.size()) {
    throw std::invalid_argument("observed and expected bin counts differ");
  }
  if (observed.size() < 2) throw std::invalid_argument("need at least two bins");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");

  double prob_sum = 0.0;
  std::uint64_t observed_sum = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double p = expected_probabilities[i];
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("expected probabilities must be finite and nonnegative");
    }
    prob_sum += p;
    observed_sum += observed[i];
  }
  if (std::abs(prob_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("expected probabilities must sum to 1");
  }
  if (observed_sum != total) throw std::invalid_argument("observed counts do not sum to total");

  GofReport report;
  report.alpha = alpha;

  // Impossible event: mass observed where none was expected.
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected_probabilities[i] == 0.0 && observed[i] > 0) {
      report.statistic = std::numeric_limits<double>::infinity();
      report.degrees_of_freedom = static_cast<int>(observed.size()) - 1;
      report.p_value = 0.0;
      report.pass = false;
      return report;
    }
  }

  std::vector<double> merged_expected;
  std::vector<double> merged_observed;
  double e_acc = 0.0;
  double o_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    e_acc += expected_probabilities[i] * static_cast<double>(total);
    o_acc += static_cast<double>(observed[i]);
    if (e_acc >= 5.0) {
      merged_expected.push_back(e_acc);
      merged_observed.push_back(o_acc);
      e_acc = 0.0;
      o_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (merged_expected.empty()) {
      merged_expected.push_back(e_acc);
      merged_observed.push_back(o_acc);
    } else {
      merged_expected.back() += e_acc;
      merged_observed.back() += o_acc;
    }
  }
  if (merged_expected.size() < 2) {
    throw std::invalid_argument("too little expected mass to form a two-bin test");
  }

  double stat = 0.0;
  for (std::size_t i = 0; i < merged_expected.size(); ++i) {
    const double d = merged_observed[i] - merged_expected[i];
    stat += d * d / merged_expected[i];
  }
  report.statistic = stat;
  report.degrees_of_freedom = static_cast<int>(merged_expected.size()) - 1;
  report.p_value = chi_square_tail(stat, report.degrees_of_freedom);
  report.pass = report.p_value >= alpha;
  return report;
}

GofReport chi_square_two_sample(std::span<const std::uint64_t> a,
                                std::span<const std::uint64_t> b, double alpha) {
  if (a.size() != b.size()) throw std::invalid_argument("samples have different bin counts");
  if (a.size() < 2) throw std::invalid_argument("need at least two bins");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");

  double total_a = 0.0;
  double total_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total_a += static_cast<double>(a[i]);
    total_b += static_cast<double>(b[i]);
  }
  if (total_a == 0.0 || total_b == 0.0) throw std::invalid_argument("each sample needs events");

  // Merge on the pooled expectation so both samples keep counts >= 5 per bin.
  struct Bin {
    double a, b, ea, eb;
  };
  std::vector<Bin> merged;
  Bin acc{0.0, 0.0, 0.0, 0.0};
  const double grand = total_a + total_b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double pooled = (static_cast<double>(a[i]) + static_cast<double>(b[i])) / grand;
    acc.a += static_cast<double>(a[i]);
    acc.b += static_cast<double>(b[i]);
    acc.ea += pooled * total_a;
    acc.eb += pooled * total_b;
    if (acc.ea >= 5.0 && acc.eb >= 5.0) {
      merged.push_back(acc);
      acc = {0.0, 0.0, 0.0, 0.0};
    }
  }
  if (acc.ea > 0.0 || acc.eb > 0.0) {
    if (merged.empty()) {
      merged.push_back(acc);
    } else {
      merged.back().a += acc.a;
      merged.back().b += acc.b;
      merged.back().ea += acc.ea;
      merged.back().eb += acc.eb;
    }
  }
  GofReport report;
  report.alpha = alpha;
  if (merged.size() < 2) {
    // Everything collapsed into one bin: the samples are trivially homogeneous.
    report.statistic = 0.0;
    report.degrees_of_freedom = 1;
    report.p_value = 1.0;
    report.pass = true;
    return report;
  }
  double stat = 0.0;
  for (const Bin& bin : merged) {
    const double da = bin.a - bin.ea;
    const double db = bin.b - bin.eb;
    stat += da * da / bin.ea + db * db / bin.eb;
  }
  report.statistic = stat;
  report.degrees_of_freedom = static_cast<int>(merged.size()) - 1;
  report.p_value = chi_square_tail(stat, report.degrees_of_freedom);
  report.pass = report.p_value >= alpha;
  return report;
}

PowerLawFit power_law_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("coordinate lists differ in length");
  const std::size_t n = xs.size();
  if (n < 3) throw std::invalid_argument("need at least three points");
  std::vector<double> lx(n);
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("power-law fit needs strictly positive data");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("abscissae are all identical");
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (my + slope * (lx[i] - mx));
    ssr += r * r;
  }
  const double variance = ssr / static_cast<double>(n - 2) / sxx;
  return {slope, std::sqrt(variance)};
}

double binomial_sigma(double p, std::uint64_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability out of range");
  if (n == 0) throw std::invalid_argument("need at least one trial");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace tqm::stats
