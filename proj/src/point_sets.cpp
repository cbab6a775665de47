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

#include "steerlab/point_sets.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "steerlab/errors.hpp"

namespace steerlab {

using Eigen::Vector3d;

double thomson_energy(const std::vector<Vector3d>& axes) {
  const int n = static_cast<int>(axes.size());
  double e = n * 0.5;  // the N pairs (u, -u) at distance 2
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      e += 2.0 * (1.0 / (axes[i] - axes[j]).norm() + 1.0 / (axes[i] + axes[j]).norm());
  return e;
}

namespace {

std::vector<Vector3d> tangent_gradient(const std::vector<Vector3d>& u) {
  const int n = static_cast<int>(u.size());
  std::vector<Vector3d> g(n, Vector3d::Zero());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vector3d dm = u[i] - u[j], dp = u[i] + u[j];
      const Vector3d gm = -2.0 * dm / std::pow(dm.norm(), 3);
      const Vector3d gp = -2.0 * dp / std::pow(dp.norm(), 3);
      g[i] += gm + gp;
      g[j] += -gm + gp;
    }
  }
  for (int i = 0; i < n; ++i) g[i] -= g[i].dot(u[i]) * u[i];
  return g;
}

// Projected gradient descent with Barzilai-Borwein steps and a monotone
// safeguard.
std::vector<Vector3d> relax(std::vector<Vector3d> u) {
  double step = 1e-2;
  double e = thomson_energy(u);
  auto g = tangent_gradient(u);
  for (int it = 0; it < 20000; ++it) {
    double gmax = 0.0;
    for (const auto& v : g) gmax = std::max(gmax, v.norm());
    if (gmax < 1e-12) break;
    std::vector<Vector3d> next(u.size());
    double e_next;
    for (;;) {
      for (size_t i = 0; i < u.size(); ++i) next[i] = (u[i] - step * g[i]).normalized();
      e_next = thomson_energy(next);
      if (e_next <= e + 1e-14 || step < 1e-16) break;
      step *= 0.5;
    }
    auto g_next = tangent_gradient(next);
    double ss = 0.0, sy = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
      const Vector3d s = next[i] - u[i], y = g_next[i] - g[i];
      ss += s.squaredNorm();
      sy += s.dot(y);
    }
    step = sy > 0 ? std::clamp(ss / sy, 1e-8, 1.0) : 1e-2;
    if (e - e_next < 1e-15 && gmax < 1e-9) {
      u = std::move(next);
      break;
    }
    u = std::move(next);
    g = std::move(g_next);
    e = e_next;
  }
  return u;
}

std::vector<Vector3d> compute_thomson(int n) {
  std::mt19937_64 rng(0x7457u + static_cast<unsigned>(n));
  std::normal_distribution<double> gauss;
  std::vector<Vector3d> best;
  double best_e = std::numeric_limits<double>::infinity();
  for (int r = 0; r < 50; ++r) {
    std::vector<Vector3d> u(n);
    for (auto& v : u) v = Vector3d(gauss(rng), gauss(rng), gauss(rng)).normalized();
    u = relax(std::move(u));
    const double e = thomson_energy(u);
    if (e < best_e - 1e-12) {
      best_e = e;
      best = u;
    }
  }
  return best;
}

class FileLock {
 public:
  explicit FileLock(const std::string& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ >= 0) ::flock(fd_, LOCK_EX);
  }
  ~FileLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

std::vector<Vector3d> disk_cached_thomson(int n) {
  const char* dir = std::getenv("STEERLAB_CACHE_DIR");
  if (!dir || !*dir) return compute_thomson(n);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path file = fs::path(dir) / ("thomson_" + std::to_string(n) + ".csv");
  FileLock lock(file.string() + ".lock");
  if (std::ifstream in(file); in) {
    auto pts = read_points_csv(in);
    if (static_cast<int>(pts.size()) == n) return pts;
  }
  auto pts = compute_thomson(n);
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    write_points_csv(out, pts);
  }
  fs::rename(tmp, file, ec);
  return pts;
}

}  // namespace

std::vector<Vector3d> thomson_axes(int n) {
  if (n < 2 || n > 18) throw InvalidParameter("thomson_axes: n must lie in [2, 18]");
  static std::mutex mu;
  static std::map<int, std::vector<Vector3d>> memo;
  std::lock_guard<std::mutex> lock(mu);
  auto it = memo.find(n);
  if (it == memo.end()) it = memo.emplace(n, disk_cached_thomson(n)).first;
  return it->second;
}

std::vector<Vector3d> fibonacci_axes(int n) {
  if (n < 2 || n > 18) throw InvalidParameter("fibonacci_axes: n must lie in [2, 18]");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vector3d> out;
  for (int i = 1; i < 2 * n; i += 2) {
    const double z = 1.0 - static_cast<double>(i) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.emplace_back(r * std::cos(i * golden), r * std::sin(i * golden), z);
  }
  return out;
}

void write_points_csv(std::ostream& os, const std::vector<Vector3d>& pts) {
  os << "x,y,z\n" << std::setprecision(17);
  for (const auto& p : pts) os << p.x() << ',' << p.y() << ',' << p.z() << '\n';
}

std::vector<Vector3d> read_points_csv(std::istream& is) {
  std::vector<Vector3d> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 'x') continue;
    std::istringstream ls(line);
    Vector3d p;
    char c1 = 0, c2 = 0;
    if (ls >> p.x() >> c1 >> p.y() >> c2 >> p.z()) out.push_back(p);
  }
  return out;
}

}  // namespace steerlab
