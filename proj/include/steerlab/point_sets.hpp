// Copyright 2026 The steerlab Authors
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

// Point configurations on the unit sphere used as measurement axes.

#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <vector>

namespace steerlab {

/// Axes u_1..u_N whose 2N points {+u_i, -u_i} minimize the Coulomb energy.
/// Deterministic; results are memoized, and persisted as thomson_<n>.csv
/// when STEERLAB_CACHE_DIR is set.  Requires 2 <= n <= 18.
std::vector<Eigen::Vector3d> thomson_axes(int n);

/// Unconstrained Coulomb energy of the antipodal configuration.
double thomson_energy(const std::vector<Eigen::Vector3d>& axes);

/// Golden-angle spiral with 2N points, z_i = 1 - i/N and azimuth
/// i * pi * (3 - sqrt 5); the odd-indexed points are the axes.
std::vector<Eigen::Vector3d> fibonacci_axes(int n);

/// One "x,y,z" line per point, with a header.
void write_points_csv(std::ostream& os, const std::vector<Eigen::Vector3d>& pts);
std::vector<Eigen::Vector3d> read_points_csv(std::istream& is);

}  // namespace steerlab
