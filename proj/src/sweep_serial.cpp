#include "sweep_detail.hpp"

namespace wgf {

SweepResult run_sweep_serial(const SweepSpec& spec) {
  return detail::sweep_with(spec, [](const SweepSpec& s, const std::vector<double>& values) {
    std::vector<detail::PointResult> out;
    out.reserve(values.size());
    for (const double v : values) out.push_back(detail::evaluate_point(s, v));
    return out;
  });
}

}  // namespace wgf
