#ifndef ORTHONET_PROJECTION_HPP
#define ORTHONET_PROJECTION_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "orthonet/types.hpp"

namespace orthonet {

/// Projection planes. The axis named in the comment is the one dropped.
enum class ViewPlane {
  XoZ,  // right-side view, drop Y
  YoZ,  // front view, drop X
  XoY,  // top view, drop Z
};

inline const char* view_plane_name(ViewPlane p) {
  switch (p) {
    case ViewPlane::XoZ: return "side";
    case ViewPlane::YoZ: return "front";
    case ViewPlane::XoY: return "top";
  }
  return "?";
}

struct ViewPoint {
  double alpha = 0.0;
  double beta = 0.0;
};

/// One orthographic view: points live in [0, extent]^2, in cloud order.
struct ProjectedView {
  ViewPlane plane = ViewPlane::XoZ;
  double extent = 0.0;
  std::vector<ViewPoint> points;

  std::size_t size() const { return points.size(); }
};

struct ViewSet {
  ProjectedView front;  // YoZ
  ProjectedView side;   // XoZ
  ProjectedView top;    // XoY
  double extent = 0.0;
};

/// Largest edge of the axis-aligned bounding box. The cloud is expected to be
/// in its reference frame already; the value sets the projection plane side.
inline double aabb_side(const PointCloud& cloud) {
  if (cloud.empty()) throw DataError("empty cloud has no bounding box");
  Vec3 lo = cloud.points.front();
  Vec3 hi = lo;
  for (const Point3& p : cloud.points) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
  const double l =
      std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
  if (!(l > 0.0))
    throw NumericError("degenerate bounding box: all points coincide");
  return l;
}

namespace detail {

inline double clamp01l(double v, double l) {
  return std::min(std::max(v, 0.0), l);
}

}  // namespace detail

/// Drop one coordinate per view, shift the surviving pair by +l/2 and clamp
/// into [0, l]^2. Point order is preserved so views stay index-corresponded.
inline ViewSet project_views(const PointCloud& cloud, double l) {
  if (cloud.empty()) throw DataError("cannot project an empty cloud");
  if (!(l > 0.0)) throw NumericError("projection side must be positive");

  ViewSet views;
  views.extent = l;
  views.front = {ViewPlane::YoZ, l, {}};
  views.side = {ViewPlane::XoZ, l, {}};
  views.top = {ViewPlane::XoY, l, {}};
  views.front.points.reserve(cloud.size());
  views.side.points.reserve(cloud.size());
  views.top.points.reserve(cloud.size());

  const double h = l / 2.0;
  for (const Point3& p : cloud.points) {
    const double a = detail::clamp01l(p.x + h, l);
    const double b = detail::clamp01l(p.y + h, l);
    const double c = detail::clamp01l(p.z + h, l);
    views.side.points.push_back({a, c});   // (x, z)
    views.front.points.push_back({b, c});  // (y, z)
    views.top.points.push_back({a, b});    // (x, y)
  }
  return views;
}

/// Pearson correlation of the (alpha, beta) scatter. Returns 0 when either
/// marginal is constant; clamped into [-1, 1] against rounding.
inline double pearson(const std::vector<ViewPoint>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw DataError("pearson needs at least 2 points");

  double ma = 0.0, mb = 0.0;
  for (const ViewPoint& p : points) {
    ma += p.alpha;
    mb += p.beta;
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);

  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (const ViewPoint& p : points) {
    const double da = p.alpha - ma;
    const double db = p.beta - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  const double r = sab / std::sqrt(saa * sbb);
  return std::min(std::max(r, -1.0), 1.0);
}

inline double pearson(const ProjectedView& view) { return pearson(view.points); }

/// Record of the sign-disambiguation step. r_x and r_y are the silhouette
/// correlations of the side and front views before any correction; mirrored
/// reports the s = r_x*r_y sign test and rotated180 whether the final
/// chirality correction fired.
struct SignResolution {
  double r_x = 0.0;
  double r_y = 0.0;
  double s = 0.0;
  bool mirrored = false;
  bool rotated180 = false;
};

namespace detail {

// Grid used only for the sign decision; relative to the view extent, so the
// statistic stays scale-free and independent of the descriptor resolution.
inline constexpr std::uint32_t kSignGrid = 64;

// Pearson correlation over the centers of the occupied cells of a binary
// kSignGrid x kSignGrid raster of the view. The raw point coordinates are
// principal-axis coordinates, whose correlation is zero by construction for
// every cloud, so they carry no orientation signal; the silhouette's cell
// scatter is not moment-whitened and does. Fewer than two occupied cells
// resolve to 0 (no signal).
inline double silhouette_pearson(const ProjectedView& view) {
  std::vector<char> occupied(
      static_cast<std::size_t>(kSignGrid) * kSignGrid, 0);
  const double scale = static_cast<double>(kSignGrid) / view.extent;
  const auto cell = [&](double v) {
    const long k = static_cast<long>(std::floor(v * scale));
    return static_cast<std::size_t>(
        std::min(std::max(k, 0L), static_cast<long>(kSignGrid) - 1L));
  };
  for (const ViewPoint& p : view.points)
    occupied[cell(p.alpha) * kSignGrid + cell(p.beta)] = 1;

  std::vector<ViewPoint> centers;
  for (std::uint32_t i = 0; i < kSignGrid; ++i)
    for (std::uint32_t j = 0; j < kSignGrid; ++j)
      if (occupied[static_cast<std::size_t>(i) * kSignGrid + j])
        centers.push_back({(i + 0.5) / scale, (j + 0.5) / scale});
  if (centers.size() < 2) return 0.0;
  return pearson(centers);
}

inline void mirror_alpha(ProjectedView& v) {
  for (ViewPoint& p : v.points) p.alpha = v.extent - p.alpha;
}

inline void mirror_beta(ProjectedView& v) {
  for (ViewPoint& p : v.points) p.beta = v.extent - p.beta;
}

inline void rotate180(ProjectedView& v) {
  for (ViewPoint& p : v.points) {
    p.alpha = v.extent - p.alpha;
    p.beta = v.extent - p.beta;
  }
}

// Third joint moment over the corresponded views; x and z are read off the
// side view, y off the front view. Odd under point reflection, even under
// the three axis-pair rotations, so its sign pins the remaining ambiguity.
inline double third_moment(const ViewSet& views) {
  const double h = views.extent / 2.0;
  double m3 = 0.0;
  for (std::size_t i = 0; i < views.side.points.size(); ++i) {
    const double x = views.side.points[i].alpha - h;
    const double y = views.front.points[i].alpha - h;
    const double z = views.side.points[i].beta - h;
    m3 += x * y * z;
  }
  return m3;
}

}  // namespace detail

/// Resolve the +-axis ambiguity of the reference frame directly on the views.
///
/// The frame's X and Y axes (and hence Z = X cross Y) are defined only up to
/// sign, so the same object can land in any of four orientations related by
/// 180-degree rotations, plus a point reflection if the input was mirrored.
/// Canonicalization runs in two steps, each expressed as the view-space image
/// of a proper rotation so the three views always stay consistent:
///
///   1. Make both correlations non-negative. r_x, the silhouette correlation
///      of the side view, flips exactly when the X axis or the Z axis flips;
///      r_y, of the front view, flips with Y or Z. Negating (X,Y) flips
///      both, negating (Y,Z) flips only r_x, negating (X,Z) flips only r_y,
///      so one 180-degree rotation always reaches r_x >= 0, r_y >= 0.
///   2. Correlations cannot see a point reflection (both corrections above
///      leave them fixed under cloud -> -cloud), so mirrored inputs still
///      differ from the original by (alpha,beta) -> (l-alpha,l-beta) on every
///      view. The third joint moment is odd under that reflection; when it is
///      negative all three views are rotated 180 degrees in-plane.
///
/// Applying the operation to its own output is the identity: step 1 leaves
/// non-negative correlations alone and step 2 a non-negative moment.
inline SignResolution disambiguate_sign(ViewSet& views) {
  if (views.side.size() != views.front.size() ||
      views.side.size() != views.top.size())
    throw DataError("views are not index-corresponded");

  if (views.side.size() < 2 || views.front.size() < 2)
    throw DataError("sign disambiguation needs at least 2 points per view");

  SignResolution res;
  res.r_x = detail::silhouette_pearson(views.side);
  res.r_y = detail::silhouette_pearson(views.front);
  res.s = res.r_x * res.r_y;
  res.mirrored = res.s < 0.0;

  const bool fx = res.r_x < 0.0;
  const bool fy = res.r_y < 0.0;
  if (fx && fy) {  // negate X and Y: rotate about Z
    detail::mirror_alpha(views.side);
    detail::mirror_alpha(views.front);
    detail::rotate180(views.top);
  } else if (fx) {  // negate Y and Z: rotate about X
    detail::mirror_beta(views.side);
    detail::rotate180(views.front);
    detail::mirror_beta(views.top);
  } else if (fy) {  // negate X and Z: rotate about Y
    detail::rotate180(views.side);
    detail::mirror_beta(views.front);
    detail::mirror_alpha(views.top);
  }

  if (detail::third_moment(views) < 0.0) {
    detail::rotate180(views.side);
    detail::rotate180(views.front);
    detail::rotate180(views.top);
    res.rotated180 = true;
  }
  return res;
}

enum class BinMode {
  density,    // normalized point-count histogram
  occupancy,  // binary occupancy, normalized to sum 1
};

/// R x R grid of non-negative bins summing to 1, row-major with the alpha
/// index major: bins[i * resolution + j] for alpha bin i, beta bin j.
struct ProjectionImage {
  std::uint32_t resolution = 0;
  ViewPlane plane = ViewPlane::XoZ;
  std::vector<double> bins;

  double at(std::uint32_t i, std::uint32_t j) const {
    return bins[static_cast<std::size_t>(i) * resolution + j];
  }
};

inline ProjectionImage rasterize(const ProjectedView& view, std::uint32_t R,
                                 BinMode mode = BinMode::density) {
  if (R < 2) throw DataError("raster resolution must be at least 2");
  if (view.points.empty()) throw DataError("cannot rasterize an empty view");
  if (!(view.extent > 0.0))
    throw NumericError("view extent must be positive");

  ProjectionImage img;
  img.resolution = R;
  img.plane = view.plane;
  img.bins.assign(static_cast<std::size_t>(R) * R, 0.0);

  const double scale = static_cast<double>(R) / view.extent;
  for (const ViewPoint& p : view.points) {
    auto idx = [&](double v) {
      const long k = static_cast<long>(std::floor(v * scale));
      return static_cast<std::size_t>(
          std::min(std::max(k, 0L), static_cast<long>(R) - 1L));
    };
    img.bins[idx(p.alpha) * R + idx(p.beta)] += 1.0;
  }

  if (mode == BinMode::occupancy) {
    double occupied = 0.0;
    for (double& b : img.bins) {
      b = b > 0.0 ? 1.0 : 0.0;
      occupied += b;
    }
    for (double& b : img.bins) b /= occupied;
  } else {
    const double total = static_cast<double>(view.points.size());
    for (double& b : img.bins) b /= total;
  }
  return img;
}

/// P2 PGM, maxval 255, bins rescaled by the grid maximum. Image rows run
/// top-down, i.e. beta descending; columns are alpha ascending.
inline std::string to_pgm(const ProjectionImage& img) {
  const std::uint32_t R = img.resolution;
  double maxv = 0.0;
  for (double b : img.bins) maxv = std::max(maxv, b);

  std::string out = "P2\n" + std::to_string(R) + " " + std::to_string(R) +
                    "\n255\n";
  char buf[8];
  for (std::uint32_t j = R; j-- > 0;) {
    for (std::uint32_t i = 0; i < R; ++i) {
      const int v = maxv > 0.0
                        ? static_cast<int>(std::lround(img.at(i, j) / maxv * 255.0))
                        : 0;
      std::snprintf(buf, sizeof(buf), i + 1 < R ? "%d " : "%d\n", v);
      out += buf;
    }
  }
  return out;
}

/// Flat binary record: R*R float32 values, little-endian, same row-major
/// order as ProjectionImage::bins. Consumed by external feature extractors.
inline std::string to_float_record(const ProjectionImage& img) {
  std::string out;
  out.reserve(img.bins.size() * 4);
  for (double b : img.bins) {
    const std::uint32_t w = std::bit_cast<std::uint32_t>(static_cast<float>(b));
    out.push_back(static_cast<char>(w & 0xFF));
    out.push_back(static_cast<char>((w >> 8) & 0xFF));
    out.push_back(static_cast<char>((w >> 16) & 0xFF));
    out.push_back(static_cast<char>((w >> 24) & 0xFF));
  }
  return out;
}

}  // namespace orthonet

#endif  // ORTHONET_PROJECTION_HPP
