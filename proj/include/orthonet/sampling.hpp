#ifndef ORTHONET_SAMPLING_HPP
#define ORTHONET_SAMPLING_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "orthonet/rng.hpp"
#include "orthonet/types.hpp"

namespace orthonet {

/// Uniform surface sampling of a triangle mesh. Triangles are chosen with
/// probability proportional to area, the point inside by the reflected
/// barycentric trick. Each sample consumes exactly three RNG counters, so the
/// result depends only on (mesh, n, rng key), never on call order.
inline PointCloud sample_mesh(const TriangleMesh& mesh, std::size_t n,
                              const CounterRng& rng) {
  if (n == 0) throw DataError("sample count must be positive");
  if (mesh.faces.empty()) throw DataError("mesh has no faces");

  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& tri = mesh.faces[f];
    const Vec3 a = mesh.vertices[tri[0]];
    const Vec3 b = mesh.vertices[tri[1]];
    const Vec3 c = mesh.vertices[tri[2]];
    total += 0.5 * (b - a).cross(c - a).norm();
    cumulative[f] = total;
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw DataError("mesh has zero surface area");

  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t base = 3ULL * static_cast<std::uint64_t>(i);
    const double pick = rng.double_at(base) * total;
    const std::size_t f = static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), pick) -
        cumulative.begin());
    const auto& tri = mesh.faces[std::min(f, mesh.faces.size() - 1)];
    const Vec3 a = mesh.vertices[tri[0]];
    const Vec3 b = mesh.vertices[tri[1]];
    const Vec3 c = mesh.vertices[tri[2]];

    double u = rng.double_at(base + 1);
    double v = rng.double_at(base + 2);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    cloud.points.push_back(a + u * (b - a) + v * (c - a));
  }
  return cloud;
}

}  // namespace orthonet

#endif  // ORTHONET_SAMPLING_HPP
