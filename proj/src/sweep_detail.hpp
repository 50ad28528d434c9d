#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wgf/floquet.hpp"
#include "wgf/sweep.hpp"

namespace wgf::detail {

struct PointResult {
  double min_p1 = 0.0;
  FloquetSolution floquet;
  bool failed = false;
  std::string error;
};

/// Pure; numerical failures are captured in the result.
PointResult evaluate_point(const SweepSpec& spec, double value);

using PointEvaluator =
    std::function<std::vector<PointResult>(const SweepSpec&, const std::vector<double>&)>;

/// Coarse pass, optional refinement pass, then index-ordered assembly.
SweepResult sweep_with(const SweepSpec& spec, const PointEvaluator& evaluate);

}  // namespace wgf::detail
