#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "field.hpp"

namespace fns2d {

struct Trajectory {
  std::vector<double> times;
  std::vector<FourierField> fields;

  std::size_t size() const { return times.size(); }
};

// 0, dt, ..., steps*dt computed as i*dt so grids built from the same dt agree bitwise.
inline std::vector<double> uniform_times(double dt, std::size_t steps) {
  std::vector<double> t(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = static_cast<double>(i) * dt;
  return t;
}

inline std::size_t steps_for(double t_final, double dt) {
  require(dt > 0.0 && t_final > 0.0, "need dt > 0 and t_final > 0");
  double r = t_final / dt;
  auto n = static_cast<std::size_t>(std::llround(r));
  require(std::abs(r - static_cast<double>(n)) < 1e-9 * std::max(1.0, r),
          "t_final=" + std::to_string(t_final) + " is not a multiple of dt=" + std::to_string(dt));
  return n;
}

}  // namespace fns2d
