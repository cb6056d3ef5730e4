#include "forgescope/methods/nfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace forgescope::methods {

namespace {

double log_binom_pmf(long n, long k, double lp, double lq) {
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0) + double(k) * lp + double(n - k) * lq;
}

}  // namespace

double log10_binomial_tail(long n, long k, double p) {
  if (k <= 0) return 0.0;
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return 0.0;
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  // Sum PMF terms from k to n in log space. Terms decay geometrically once
  // past the mode, so cap the count and stop when the increment vanishes.
  double log_term = log_binom_pmf(n, k, lp, lq);
  double log_sum = log_term;
  const double log_odds = lp - lq;
  for (long j = k + 1; j <= n; ++j) {
    // term(j) = term(j-1) * (n-j+1)/j * p/(1-p)
    log_term += std::log(double(n - j + 1) / double(j)) + log_odds;
    // Remaining tail is at most (n-j+1) copies of the current term; stop once
    // that bound cannot move the sum. Only valid past the mode, where terms
    // decrease.
    if (double(j) > double(n) * p &&
        log_term + std::log(double(n - j + 1)) < log_sum - 30.0) {
      break;
    }
    const double m = std::max(log_sum, log_term);
    log_sum = m + std::log(std::exp(log_sum - m) + std::exp(log_term - m));
  }
  return std::min(0.0, log_sum / std::log(10.0));
}

}  // namespace forgescope::methods
