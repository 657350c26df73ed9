#ifndef ORTHONET_SYM_EIGEN_HPP
#define ORTHONET_SYM_EIGEN_HPP

#include <algorithm>
#include <array>
#include <cmath>

#include "orthonet/types.hpp"

namespace orthonet {

/// Symmetric 3x3 matrix stored as its six independent entries.
struct SymMat3 {
  double a11 = 0, a12 = 0, a13 = 0, a22 = 0, a23 = 0, a33 = 0;

  Vec3 apply(const Vec3& v) const {
    return {a11 * v.x + a12 * v.y + a13 * v.z,
            a12 * v.x + a22 * v.y + a23 * v.z,
            a13 * v.x + a23 * v.y + a33 * v.z};
  }

  double frobenius() const {
    return std::sqrt(a11 * a11 + a22 * a22 + a33 * a33 +
                     2.0 * (a12 * a12 + a13 * a13 + a23 * a23));
  }

  bool finite() const {
    return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a13) &&
           std::isfinite(a22) && std::isfinite(a23) && std::isfinite(a33);
  }
};

/// Eigen-decomposition of a SymMat3. Eigenvalues sorted descending, unit
/// eigenvectors, right-handed (v1 x v2 . v3 > 0). The degenerate flags report
/// near-equal adjacent eigenvalues relative to lambda1.
struct EigenBasis {
  std::array<double, 3> lambda{};  // lambda[0] >= lambda[1] >= lambda[2]
  std::array<Vec3, 3> v{};
  bool degenerate12 = false;
  bool degenerate23 = false;

  bool degenerate() const { return degenerate12 || degenerate23; }
};

namespace detail {

// One Jacobi rotation in the (p,q) plane, annihilating a[p][q].
// Classic tangent formulation; accumulates the rotation into vec.
inline void jacobi_rotate(double a[3][3], double vec[3][3], int p, int q) {
  const double apq = a[p][q];
  if (apq == 0.0) return;
  const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  const double app = a[p][p];
  const double aqq = a[q][q];
  a[p][p] = app - t * apq;
  a[q][q] = aqq + t * apq;
  a[p][q] = a[q][p] = 0.0;
  for (int r = 0; r < 3; ++r) {
    if (r != p && r != q) {
      const double arp = a[r][p];
      const double arq = a[r][q];
      a[r][p] = a[p][r] = arp - s * (arq + tau * arp);
      a[r][q] = a[q][r] = arq + s * (arp - tau * arq);
    }
    const double vrp = vec[r][p];
    const double vrq = vec[r][q];
    vec[r][p] = vrp - s * (vrq + tau * vrp);
    vec[r][q] = vrq + s * (vrp - tau * vrq);
  }
}

inline double offdiag_frobenius(const double a[3][3]) {
  return std::sqrt(2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] +
                          a[1][2] * a[1][2]));
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for symmetric 3x3 matrices. Sweeps until the
/// off-diagonal Frobenius norm drops below 1e-12 of the input norm, at most
/// 50 sweeps. `degeneracy_tol` controls the near-equal-eigenvalue flags:
/// a gap is degenerate when (lambda_i - lambda_j) <= tol * max(lambda1, eps).
inline EigenBasis eigen_decompose_sym3(const SymMat3& m,
                                       double degeneracy_tol = 1e-6) {
  if (!m.finite()) throw NumericError("eigen_decompose_sym3: non-finite matrix");

  double a[3][3] = {{m.a11, m.a12, m.a13},
                    {m.a12, m.a22, m.a23},
                    {m.a13, m.a23, m.a33}};
  double vec[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  const double stop = 1e-12 * m.frobenius();
  for (int sweep = 0; sweep < 50; ++sweep) {
    if (detail::offdiag_frobenius(a) <= stop) break;
    detail::jacobi_rotate(a, vec, 0, 1);
    detail::jacobi_rotate(a, vec, 0, 2);
    detail::jacobi_rotate(a, vec, 1, 2);
  }

  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a[i][i] > a[j][j]; });

  EigenBasis out;
  for (int k = 0; k < 3; ++k) {
    const int c = order[k];
    out.lambda[k] = a[c][c];
    out.v[k] = Vec3{vec[0][c], vec[1][c], vec[2][c]}.normalized();
  }

  // Column swaps can flip orientation; v3 is free, so fix handedness there.
  if (out.v[0].cross(out.v[1]).dot(out.v[2]) < 0.0) out.v[2] = -out.v[2];

  const double denom = std::max(out.lambda[0], 1e-30);
  out.degenerate12 = (out.lambda[0] - out.lambda[1]) <= degeneracy_tol * denom;
  out.degenerate23 = (out.lambda[1] - out.lambda[2]) <= degeneracy_tol * denom;
  return out;
}

}  // namespace orthonet

#endif  // ORTHONET_SYM_EIGEN_HPP
