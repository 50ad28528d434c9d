#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "wgf/analysis.hpp"
#include "wgf/error.hpp"

namespace wgf {

std::vector<ResonancePrediction> resonance_positions(double omega1, double omega, int n_max) {
  if (n_max < 1) throw ConfigError(fmt::format("n_max must be >= 1 (got {})", n_max));
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  if (!(omega1 >= 0.0)) throw ConfigError("omega1 must be non-negative");
  std::vector<ResonancePrediction> out;
  for (int n = 1; n <= n_max; ++n) {
    const double target = n * omega;
    if (target <= omega1) continue;
    out.push_back({n, target, std::sqrt(target * target - omega1 * omega1), target});
  }
  return out;
}

void write_resonance_csv(std::ostream& out, const std::vector<ResonancePrediction>& rows) {
  out << "n,omega0,omega2_star,omega2_naive\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{:.10g},{:.10g},{:.10g}\n", r.n, r.omega0, r.omega2_star,
                       r.omega2_naive);
  }
}

}  // namespace wgf
