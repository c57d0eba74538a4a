#pragma once

#include <cmath>
#include <string>

#include "conjmatch/errors.hpp"

namespace conjmatch {

enum class LossBowl { Quadratic, Cubic };

/// Parameters of the general robust loss rho(x; alpha, c). The cubic bowl
/// variant substitutes |x/c|^3 for (x/c)^2 inside the general form, which
/// flattens the loss near zero so small discretisation errors go unpenalised.
struct RobustLossParams {
  double alpha = -2.0;
  double c = 0.15;
  LossBowl bowl = LossBowl::Quadratic;
};

inline double robustLoss(double x, const RobustLossParams& p) {
  if (x < 0.0) throw DomainError("robust loss argument must be nonnegative");
  if (p.c <= 0.0) throw DomainError("robust loss scale must be positive");
  const double r = x / p.c;
  const double bowl = p.bowl == LossBowl::Quadratic ? r * r : r * r * r;  // x >= 0, so |r|^3 = r^3
  const double a = p.alpha;
  if (std::abs(a - 2.0) < 1e-12) return 0.5 * bowl;
  if (std::abs(a) < 1e-12) return std::log(0.5 * bowl + 1.0);
  const double am2 = std::abs(a - 2.0);
  return (am2 / a) * (std::pow(bowl / am2 + 1.0, 0.5 * a) - 1.0);
}

inline LossBowl parseBowl(const std::string& s) {
  if (s == "quadratic") return LossBowl::Quadratic;
  if (s == "cubic") return LossBowl::Cubic;
  throw DomainError("unknown loss bowl: " + s);
}

inline const char* bowlName(LossBowl b) {
  return b == LossBowl::Quadratic ? "quadratic" : "cubic";
}

/// Defaults used by the matching energy: a saturating quadratic-bowl loss for
/// thickness differences and a flat-bottomed cubic-bowl loss for frame
/// rotation angles.
inline RobustLossParams defaultDataLoss() { return {-2.0, 0.15, LossBowl::Quadratic}; }
inline RobustLossParams defaultRigidityLoss() { return {0.7, 0.6, LossBowl::Cubic}; }

}  // namespace conjmatch
