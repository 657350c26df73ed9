#ifndef ORTHONET_TYPES_HPP
#define ORTHONET_TYPES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace orthonet {

/// Base class for every error the library raises on purpose. Anything else
/// escaping the public API is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input bytes (OFF/PLY/XYZ, embedding files, stores, configs).
/// Carries a 1-based line number when one makes sense, 0 otherwise.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Structurally valid input that violates a contract (dimension mismatch,
/// unknown label, schema problems, datasets too small).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Recognizable but unsupported encodings (e.g. binary PLY).
class UnsupportedFormatError : public DataError {
 public:
  using DataError::DataError;
};

/// Numeric or geometric degeneracy: empty clouds where math needs points,
/// zero-extent bounding boxes, ill-conditioned reference frames.
class NumericError : public Error {
 public:
  using Error::Error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
  constexpr Vec3 operator/(double k) const { return {x / k, y / k, z / k}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    if (n == 0.0) throw NumericError("cannot normalize zero vector");
    return *this / n;
  }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
  constexpr bool operator==(const Vec3& o) const {
    return x == o.x && y == o.y && z == o.z;
  }
};

inline constexpr Vec3 operator*(double k, const Vec3& v) { return v * k; }

using Point3 = Vec3;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Ordered point set, optionally with per-point colors. When colors are
/// present they run parallel to points.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<Rgb> colors;  // empty, or same length as points

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_colors() const { return !colors.empty(); }
};

/// Triangle mesh: vertex indices per face, all faces triangles.
struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
};

}  // namespace orthonet

#endif  // ORTHONET_TYPES_HPP
