#ifndef ORTHONET_FRAME_HPP
#define ORTHONET_FRAME_HPP

#include <algorithm>
#include <cstdio>
#include <string>

#include "orthonet/sym_eigen.hpp"
#include "orthonet/types.hpp"

namespace orthonet {

/// Object-attached coordinate system: centroid plus right-handed orthonormal
/// axes. Doubles as the pose estimate of the object.
struct ReferenceFrame {
  Point3 origin;
  Vec3 x, y, z;

  static ReferenceFrame identity() {
    return {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  }
};

/// Raised when the leading eigenvalues are too close for a repeatable frame.
/// Carries the basis so callers can inspect or apply the tie-break.
class DegenerateFrameError : public NumericError {
 public:
  DegenerateFrameError(const std::string& msg, EigenBasis basis)
      : NumericError(msg), basis_(basis) {}
  const EigenBasis& basis() const { return basis_; }

 private:
  EigenBasis basis_;
};

enum class DegeneracyPolicy {
  fail,      // throw DegenerateFrameError
  tie_break  // reorder tied eigenvectors deterministically and proceed
};

inline Point3 centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw NumericError("centroid: empty cloud");
  Vec3 sum{0, 0, 0};
  for (const auto& p : cloud.points) sum += p;
  return sum / static_cast<double>(cloud.size());
}

/// Population covariance (1/n) of the cloud about center c.
inline SymMat3 covariance(const PointCloud& cloud, const Point3& c) {
  if (cloud.empty()) throw NumericError("covariance: empty cloud");
  SymMat3 m;
  for (const auto& p : cloud.points) {
    const Vec3 d = p - c;
    m.a11 += d.x * d.x;
    m.a12 += d.x * d.y;
    m.a13 += d.x * d.z;
    m.a22 += d.y * d.y;
    m.a23 += d.y * d.z;
    m.a33 += d.z * d.z;
  }
  const double inv_n = 1.0 / static_cast<double>(cloud.size());
  m.a11 *= inv_n;
  m.a12 *= inv_n;
  m.a13 *= inv_n;
  m.a22 *= inv_n;
  m.a23 *= inv_n;
  m.a33 *= inv_n;
  return m;
}

namespace detail {

// Lexicographic order on the absolute component pattern, largest first.
inline bool abs_pattern_greater(const Vec3& a, const Vec3& b) {
  const double ax = std::abs(a.x), ay = std::abs(a.y), az = std::abs(a.z);
  const double bx = std::abs(b.x), by = std::abs(b.y), bz = std::abs(b.z);
  if (ax != bx) return ax > bx;
  if (ay != by) return ay > by;
  return az > bz;
}

// Deterministic reordering of eigenvectors whose eigenvalues tie. Eigenvalue
// order carries no information inside a tied group, so order by the
// absolute-value component pattern instead.
inline void apply_tie_break(EigenBasis& basis) {
  int lo = 0, hi = 0;  // inclusive index range of the tied group
  if (basis.degenerate12 && basis.degenerate23) {
    lo = 0;
    hi = 2;
  } else if (basis.degenerate12) {
    lo = 0;
    hi = 1;
  } else if (basis.degenerate23) {
    lo = 1;
    hi = 2;
  } else {
    return;
  }
  for (int i = lo; i <= hi; ++i)
    for (int j = i + 1; j <= hi; ++j)
      if (abs_pattern_greater(basis.v[j], basis.v[i])) {
        std::swap(basis.v[i], basis.v[j]);
        std::swap(basis.lambda[i], basis.lambda[j]);
      }
}

}  // namespace detail

/// Build the global object reference frame: origin at the centroid, X and Y
/// along the two leading covariance eigenvectors, Z their cross product.
/// Axis signs are arbitrary at this stage; the projection module resolves
/// them. Needs >= 3 points and a non-degenerate eigen gap (unless the
/// tie-break policy is selected).
inline ReferenceFrame build_reference_frame(
    const PointCloud& cloud, DegeneracyPolicy policy = DegeneracyPolicy::fail,
    double degeneracy_tol = 1e-6) {
  if (cloud.size() < 3)
    throw NumericError("build_reference_frame: need at least 3 points");

  const Point3 c = centroid(cloud);
  EigenBasis basis = eigen_decompose_sym3(covariance(cloud, c), degeneracy_tol);
  if (basis.degenerate()) {
    if (policy == DegeneracyPolicy::fail)
      throw DegenerateFrameError(
          "build_reference_frame: near-equal eigenvalues, frame not repeatable",
          basis);
    detail::apply_tie_break(basis);
  }

  ReferenceFrame f;
  f.origin = c;
  f.x = basis.v[0];
  f.y = basis.v[1];
  f.z = f.x.cross(f.y).normalized();
  return f;
}

/// Express the cloud in frame coordinates: p -> ((p-c).X, (p-c).Y, (p-c).Z).
inline PointCloud transform_to_frame(const PointCloud& cloud,
                                     const ReferenceFrame& f) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    const Vec3 d = p - f.origin;
    out.points.push_back({d.dot(f.x), d.dot(f.y), d.dot(f.z)});
  }
  out.colors = cloud.colors;
  return out;
}

/// 12-number row-major text record: origin, X, Y, Z. 9 significant digits.
inline std::string format_pose(const ReferenceFrame& f) {
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "%.9g %.9g %.9g %.9g %.9g %.9g %.9g %.9g %.9g %.9g %.9g %.9g",
                f.origin.x, f.origin.y, f.origin.z, f.x.x, f.x.y, f.x.z,
                f.y.x, f.y.y, f.y.z, f.z.x, f.z.y, f.z.z);
  return buf;
}

}  // namespace orthonet

#endif  // ORTHONET_FRAME_HPP
