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

#include "quench/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace quench {

namespace {

void check_steps(const std::vector<std::pair<double, double>>& steps,
                 double t_final, const char* what) {
  if (steps.empty()) throw std::invalid_argument(std::string(what) + ": empty");
  if (steps.front().first != 0.0)
    throw std::invalid_argument(std::string(what) + ": must start at t = 0");
  for (std::size_t i = 1; i < steps.size(); ++i)
    if (steps[i].first <= steps[i - 1].first)
      throw std::invalid_argument(std::string(what) +
                                  ": times must be strictly increasing");
  if (steps.back().first > t_final)
    throw std::invalid_argument(std::string(what) +
                                ": breakpoint beyond t_final");
}

}  // namespace

Schedule Schedule::piecewise_constant(
    Channel channel, std::vector<std::pair<double, double>> steps,
    double t_final, bool require_monotone) {
  check_steps(steps, t_final, "Schedule::piecewise_constant");
  Schedule s;
  s.kind_ = ScheduleKind::PiecewiseConstant;
  s.channel_ = channel;
  s.steps_ = std::move(steps);
  s.t_final_ = t_final;
  if (require_monotone) require_monotone_nondecreasing(s);
  return s;
}

Schedule Schedule::linear(Channel channel, double v0, double v1,
                          double t_final) {
  if (t_final <= 0.0)
    throw std::invalid_argument("Schedule::linear: t_final must be > 0");
  Schedule s;
  s.kind_ = ScheduleKind::Linear;
  s.channel_ = channel;
  s.params_[0] = v0;
  s.params_[1] = v1;
  s.t_final_ = t_final;
  return s;
}

Schedule Schedule::square_gaussian(Channel channel, double amplitude,
                                   double centre, double width,
                                   double t_final) {
  if (t_final <= 0.0 || width <= 0.0)
    throw std::invalid_argument(
        "Schedule::square_gaussian: t_final and width must be > 0");
  Schedule s;
  s.kind_ = ScheduleKind::SquareGaussian;
  s.channel_ = channel;
  s.params_[0] = amplitude;
  s.params_[1] = centre;
  s.params_[2] = width;
  s.t_final_ = t_final;
  return s;
}

Schedule Schedule::tabulated(Channel channel,
                             std::vector<std::pair<double, double>> knots,
                             double t_final, bool require_monotone) {
  check_steps(knots, t_final, "Schedule::tabulated");
  if (knots.size() < 2)
    throw std::invalid_argument("Schedule::tabulated: need at least 2 knots");
  Schedule s;
  s.kind_ = ScheduleKind::Tabulated;
  s.channel_ = channel;
  s.steps_ = std::move(knots);
  s.t_final_ = t_final;
  if (require_monotone) require_monotone_nondecreasing(s);
  return s;
}

Schedule Schedule::constant(Channel channel, double value, double t_final) {
  return piecewise_constant(channel, {{0.0, value}}, t_final);
}

void Schedule::check_domain(double t) const {
  const double slack = 1e-9 * std::max(1.0, t_final_);
  if (t < -slack || t > t_final_ + slack)
    throw std::invalid_argument("Schedule: t outside [0, t_final]");
}

double Schedule::value(double t) const {
  check_domain(t);
  t = std::clamp(t, 0.0, t_final_);
  switch (kind_) {
    case ScheduleKind::PiecewiseConstant: {
      // value v_k applies on (t_k, t_{k+1}]
      std::size_t k = 0;
      while (k + 1 < steps_.size() && steps_[k + 1].first < t) ++k;
      return steps_[k].second;
    }
    case ScheduleKind::Linear:
      return params_[0] + (params_[1] - params_[0]) * (t / t_final_);
    case ScheduleKind::SquareGaussian: {
      const double x = (t - params_[1]) / params_[2];
      return params_[0] * std::exp(-x * x * x * x);
    }
    case ScheduleKind::Tabulated: {
      if (t <= steps_.front().first) return steps_.front().second;
      if (t >= steps_.back().first) return steps_.back().second;
      std::size_t k = 0;
      while (k + 1 < steps_.size() && steps_[k + 1].first < t) ++k;
      const auto [t0, v0] = steps_[k];
      const auto [t1, v1] = steps_[k + 1];
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return 0.0;
}

double Schedule::derivative(double t) const {
  check_domain(t);
  t = std::clamp(t, 0.0, t_final_);
  switch (kind_) {
    case ScheduleKind::PiecewiseConstant:
      return 0.0;
    case ScheduleKind::Linear:
      return (params_[1] - params_[0]) / t_final_;
    case ScheduleKind::SquareGaussian: {
      const double x = (t - params_[1]) / params_[2];
      return -4.0 * x * x * x / params_[2] * params_[0] *
             std::exp(-x * x * x * x);
    }
    case ScheduleKind::Tabulated: {
      if (t <= steps_.front().first || t >= steps_.back().first) return 0.0;
      std::size_t k = 0;
      while (k + 1 < steps_.size() && steps_[k + 1].first < t) ++k;
      const auto [t0, v0] = steps_[k];
      const auto [t1, v1] = steps_[k + 1];
      return (v1 - v0) / (t1 - t0);
    }
  }
  return 0.0;
}

std::vector<double> Schedule::breakpoints() const {
  std::vector<double> out;
  if (kind_ == ScheduleKind::PiecewiseConstant ||
      kind_ == ScheduleKind::Tabulated) {
    for (const auto& [t, v] : steps_)
      if (t > 0.0 && t < t_final_) out.push_back(t);
  }
  return out;
}

Schedule Schedule::stretched(double factor) const {
  if (factor <= 0.0)
    throw std::invalid_argument("Schedule::stretched: factor must be > 0");
  Schedule s = *this;
  s.t_final_ *= factor;
  for (auto& [t, v] : s.steps_) t *= factor;
  if (kind_ == ScheduleKind::SquareGaussian) {
    s.params_[1] *= factor;  // centre
    s.params_[2] *= factor;  // width
  }
  return s;
}

void require_monotone_nondecreasing(const Schedule& s, int grid_points) {
  double prev = s.value(0.0);
  for (int i = 1; i <= grid_points; ++i) {
    const double t = s.t_final() * double(i) / double(grid_points);
    const double v = s.value(t);
    if (v < prev - 1e-12)
      throw std::invalid_argument(
          "Schedule: flagged monotone but decreases on the validation grid");
    prev = v;
  }
}

}  // namespace quench
