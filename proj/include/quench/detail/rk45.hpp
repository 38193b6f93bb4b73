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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quench::detail {

// Dormand-Prince 5(4) embedded pair with FSAL, templated over an Eigen-like
// state (VectorXcd, MatrixXcd). Rhs signature: rhs(t, y, out). PostStep is
// called after every accepted step and may modify y (renormalisation guard).
template <typename State, typename Rhs, typename PostStep>
void rk45_integrate(Rhs&& rhs, State& y, double t0, double t1, double rtol,
                    double atol, PostStep&& post_step,
                    long max_steps = 2000000) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (t1 <= t0) return;
  const double span = t1 - t0;
  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, tmp = y,
        ynew = y;

  double t = t0;
  double h = span / 64.0;
  rhs(t, y, k1);
  bool k1_fresh = true;
  long steps = 0;

  while (t < t1 - 1e-14 * span) {
    if (++steps > max_steps)
      throw std::runtime_error("rk45: step limit exceeded (tolerance failure)");
    h = std::min(h, t1 - t);

    if (!k1_fresh) rhs(t, y, k1);
    tmp = y + (h * a21) * k1;
    rhs(t + c2 * h, tmp, k2);
    tmp = y + (h * a31) * k1 + (h * a32) * k2;
    rhs(t + c3 * h, tmp, k3);
    tmp = y + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3;
    rhs(t + c4 * h, tmp, k4);
    tmp = y + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 + (h * a54) * k4;
    rhs(t + c5 * h, tmp, k5);
    tmp = y + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 +
          (h * a64) * k4 + (h * a65) * k5;
    rhs(t + h, tmp, k6);
    ynew = y + (h * b1) * k1 + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 +
           (h * b6) * k6;
    rhs(t + h, ynew, k7);

    tmp = (h * e1) * k1 + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 +
          (h * e6) * k6 + (h * e7) * k7;
    const auto scale = (atol + rtol * y.cwiseAbs().cwiseMax(ynew.cwiseAbs()).array()).matrix();
    const double err = std::sqrt(
        (tmp.cwiseAbs().array() / scale.array()).square().sum() /
        double(scale.size()));

    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      k1_fresh = true;
      post_step(t, y);
    } else {
      k1_fresh = true;  // y unchanged, k1 still valid
    }
    const double factor =
        err <= 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::max(h * factor, 1e-14 * span);
  }
}

}  // namespace quench::detail
