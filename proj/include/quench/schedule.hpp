// Copyright 2026 The Quench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace quench {

enum class ScheduleKind { PiecewiseConstant, Linear, SquareGaussian, Tabulated };

// Which coefficient of the composite Hamiltonian the schedule drives:
// DriverCoeff covers A(t), g and G(t); ProblemCoeff covers B(t) and Gamma(t).
enum class Channel { DriverCoeff, ProblemCoeff };

// Time-dependent coefficient on [0, t_final].
//
// Piecewise-constant values are attained on half-open intervals: a value
// listed with start time t_k applies on (t_k, t_{k+1}], so at a quench time
// the pre-quench coefficient is still in force (the new value applies just
// after). value(0) is the first listed value.
class Schedule {
 public:
  static Schedule piecewise_constant(Channel channel,
                                     std::vector<std::pair<double, double>> steps,
                                     double t_final, bool require_monotone = false);
  static Schedule linear(Channel channel, double v0, double v1, double t_final);
  // G(t) = g * exp(-((t - centre)/width)^4)
  static Schedule square_gaussian(Channel channel, double amplitude,
                                  double centre, double width, double t_final);
  static Schedule tabulated(Channel channel,
                            std::vector<std::pair<double, double>> knots,
                            double t_final, bool require_monotone = false);
  static Schedule constant(Channel channel, double value, double t_final);

  double value(double t) const;
  double derivative(double t) const;  // 0 inside piecewise-constant segments
  double t_final() const { return t_final_; }
  Channel channel() const { return channel_; }
  ScheduleKind kind() const { return kind_; }
  bool piecewise_constant_kind() const {
    return kind_ == ScheduleKind::PiecewiseConstant;
  }

  // interior times where the value or slope jumps
  std::vector<double> breakpoints() const;

  // same shape on a stretched time axis [0, factor * t_final]
  Schedule stretched(double factor) const;

  const std::vector<std::pair<double, double>>& steps() const { return steps_; }
  double param(int i) const { return params_[i]; }

 private:
  Schedule() = default;
  void check_domain(double t) const;

  ScheduleKind kind_ = ScheduleKind::Linear;
  Channel channel_ = Channel::ProblemCoeff;
  std::vector<std::pair<double, double>> steps_;  // pc: (start, value); tab: knots
  double params_[4] = {0, 0, 0, 0};
  double t_final_ = 0.0;
};

void require_monotone_nondecreasing(const Schedule& s, int grid_points = 512);

}  // namespace quench
