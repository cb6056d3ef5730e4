#pragma once

namespace forgescope::methods {

/// log10 of the binomial tail P(X >= k), X ~ Binomial(n, p).
/// Returns 0 for k <= 0 and -inf for k > n. Computed in log space,
/// stable for n in the hundreds of thousands.
double log10_binomial_tail(long n, long k, double p);

}  // namespace forgescope::methods
