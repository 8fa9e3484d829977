#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

// Central finite differences, used as an independent check of analytic
// gradients. The default step balances truncation error (h^2) against
// roundoff (eps / h); at 1e-6 roundoff dominates gradients near 1e-6.

namespace oracle {

inline double central_difference(const std::function<double()>& f, double& x, double h = 1e-5) {
  const double saved = x;
  x = saved + h;
  const double plus = f();
  x = saved - h;
  const double minus = f();
  x = saved;
  return (plus - minus) / (2.0 * h);
}

/// |a - b| / max(|a|, |b|, floor); the floor keeps near-zero pairs from
/// dominating.
inline double relative_error(double analytic, double numeric, double floor = 1e-8) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

}  // namespace oracle
