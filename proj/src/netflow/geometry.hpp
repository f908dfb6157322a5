// Copyright 2026 The netflow Authors
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

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace netflow {

// Ambient dimensions above this are rejected; keeps points on the stack.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

inline constexpr double kPi = 3.14159265358979323846;

/// Error raised for violated preconditions. Report-valued operations never throw.
class Error : public std::runtime_error {
 public:
  enum class Code { InvalidArgument, Domain, Parse, Io, Internal };
  Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

[[noreturn]] inline void fail(const std::string& what) {
  throw Error(Error::Code::InvalidArgument, what);
}
[[noreturn]] inline void fail_domain(const std::string& what) {
  throw Error(Error::Code::Domain, what);
}

inline Vec zeros(int dim) { return Vec::Zero(dim); }

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

inline Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

inline bool all_finite(const Vec& v) {
  for (int i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

/// Squared distance from p to segment [a,b]; also returns the segment parameter.
inline double point_segment_dist2(const Vec& p, const Vec& a, const Vec& b, double* s_out = nullptr) {
  const Vec ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = 0.0;
  if (len2 > 0.0) s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  if (s_out) *s_out = s;
  return (a + s * ab - p).squaredNorm();
}

/// Squared distance between segments [p0,p1] and [q0,q1] in any dimension.
double segment_segment_dist2(const Vec& p0, const Vec& p1, const Vec& q0, const Vec& q1);

/// Angle in [0, pi] between two nonzero vectors.
inline double angle_between(const Vec& a, const Vec& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace netflow
