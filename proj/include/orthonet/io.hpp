#ifndef ORTHONET_IO_HPP
#define ORTHONET_IO_HPP

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "orthonet/types.hpp"

namespace orthonet {
namespace detail {

// Iterates physical lines of a byte buffer, tracking 1-based line numbers.
// Handles \n and \r\n endings and a missing final newline.
class LineScanner {
 public:
  explicit LineScanner(std::string_view bytes) : rest_(bytes) {}

  bool next(std::string_view& line) {
    if (rest_.empty()) return false;
    ++line_no_;
    const std::size_t nl = rest_.find('\n');
    if (nl == std::string_view::npos) {
      line = rest_;
      rest_ = {};
    } else {
      line = rest_.substr(0, nl);
      rest_.remove_prefix(nl + 1);
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return true;
  }

  // Next line that is neither blank nor a '#' comment.
  bool next_data(std::string_view& line) {
    while (next(line)) {
      const std::size_t pos = line.find_first_not_of(" \t");
      if (pos == std::string_view::npos) continue;
      if (line[pos] == '#') continue;
      return true;
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view rest_;
  std::size_t line_no_ = 0;
};

inline void split_tokens(std::string_view line, bool allow_comma,
                         std::vector<std::string_view>& out) {
  out.clear();
  std::size_t i = 0;
  const auto is_sep = [&](char c) {
    return c == ' ' || c == '\t' || (allow_comma && c == ',');
  };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
}

inline double parse_double(std::string_view tok, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError("expected a number, got '" + std::string(tok) + "'",
                     line_no);
  if (!std::isfinite(value))
    throw ParseError("non-finite coordinate '" + std::string(tok) + "'",
                     line_no);
  return value;
}

inline std::uint64_t parse_count(std::string_view tok, std::size_t line_no) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError("expected a non-negative integer, got '" +
                         std::string(tok) + "'",
                     line_no);
  return value;
}

/// Shortest stable rendering used by every emitted report (9 significant
/// digits round-trips float32-derived values and keeps reports byte-stable).
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::uint8_t parse_color_channel(std::string_view tok,
                                        std::size_t line_no) {
  const double v = parse_double(tok, line_no);
  if (v < 0.0 || v > 255.0)
    throw ParseError("color channel out of [0,255]: '" + std::string(tok) + "'",
                     line_no);
  return static_cast<std::uint8_t>(std::lround(v));
}

}  // namespace detail

/// Parse ASCII OFF. Faces with more than three vertices are fan-triangulated
/// from vertex 0. Blank lines and '#' comments are skipped anywhere; the
/// counts may follow "OFF" on the same line (a common dataset quirk).
inline TriangleMesh parse_off(std::string_view bytes) {
  detail::LineScanner scan(bytes);
  std::vector<std::string_view> tok;
  std::string_view line;

  if (!scan.next_data(line)) throw ParseError("empty input, expected OFF header");
  detail::split_tokens(line, false, tok);
  if (tok.empty() || tok[0] != "OFF")
    throw ParseError("malformed header, expected OFF", scan.line_no());
  if (tok.size() == 1) {
    if (!scan.next_data(line))
      throw ParseError("unexpected end of file, expected counts", scan.line_no());
    detail::split_tokens(line, false, tok);
  } else {
    tok.erase(tok.begin());
  }
  if (tok.size() < 2)
    throw ParseError("counts line needs vertex and face counts", scan.line_no());
  const std::uint64_t n_vertices = detail::parse_count(tok[0], scan.line_no());
  const std::uint64_t n_faces = detail::parse_count(tok[1], scan.line_no());

  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(
      std::min<std::uint64_t>(n_vertices, 1u << 20)));
  for (std::uint64_t i = 0; i < n_vertices; ++i) {
    if (!scan.next_data(line))
      throw ParseError("unexpected end of file in vertex list", scan.line_no());
    detail::split_tokens(line, false, tok);
    if (tok.size() < 3)
      throw ParseError("vertex line needs 3 coordinates", scan.line_no());
    mesh.vertices.push_back({detail::parse_double(tok[0], scan.line_no()),
                             detail::parse_double(tok[1], scan.line_no()),
                             detail::parse_double(tok[2], scan.line_no())});
  }

  mesh.faces.reserve(static_cast<std::size_t>(
      std::min<std::uint64_t>(n_faces, 1u << 20)));
  for (std::uint64_t i = 0; i < n_faces; ++i) {
    if (!scan.next_data(line))
      throw ParseError("unexpected end of file in face list", scan.line_no());
    detail::split_tokens(line, false, tok);
    if (tok.empty())
      throw ParseError("empty face line", scan.line_no());
    const std::uint64_t k = detail::parse_count(tok[0], scan.line_no());
    if (k < 3)
      throw ParseError("face needs at least 3 vertices", scan.line_no());
    if (tok.size() - 1 < k)  // tok is non-empty; avoids overflow of 1 + k
      throw ParseError("face lists " + std::to_string(k) + " vertices but has " +
                           std::to_string(tok.size() - 1),
                       scan.line_no());
    std::vector<std::uint32_t> idx(static_cast<std::size_t>(k));
    for (std::uint64_t j = 0; j < k; ++j) {
      const std::uint64_t v = detail::parse_count(tok[1 + j], scan.line_no());
      if (v >= n_vertices)
        throw ParseError("face index " + std::to_string(v) + " out of range (" +
                             std::to_string(n_vertices) + " vertices)",
                         scan.line_no());
      idx[j] = static_cast<std::uint32_t>(v);
    }
    for (std::uint64_t j = 1; j + 1 < k; ++j) {
      const std::array<std::uint32_t, 3> tri{idx[0], idx[j], idx[j + 1]};
      if (tri[0] == tri[1] || tri[0] == tri[2] || tri[1] == tri[2])
        throw ParseError("degenerate face with repeated vertex index",
                         scan.line_no());
      mesh.faces.push_back(tri);
    }
  }
  return mesh;
}

/// Parse XYZ / CSV point lists: 3 fields per line (x y z) or 6 (x y z r g b),
/// separated by whitespace or commas. Blank lines and '#' comments skipped.
inline PointCloud parse_xyz(std::string_view bytes) {
  detail::LineScanner scan(bytes);
  std::vector<std::string_view> tok;
  std::string_view line;
  PointCloud cloud;
  bool colored = false;

  while (scan.next_data(line)) {
    detail::split_tokens(line, true, tok);
    if (tok.size() != 3 && tok.size() != 6)
      throw ParseError("expected 3 (xyz) or 6 (xyzrgb) fields, got " +
                           std::to_string(tok.size()),
                       scan.line_no());
    if (cloud.empty())
      colored = (tok.size() == 6);
    else if (colored != (tok.size() == 6))
      throw ParseError("mixed colored and uncolored points", scan.line_no());

    cloud.points.push_back({detail::parse_double(tok[0], scan.line_no()),
                            detail::parse_double(tok[1], scan.line_no()),
                            detail::parse_double(tok[2], scan.line_no())});
    if (colored)
      cloud.colors.push_back({detail::parse_color_channel(tok[3], scan.line_no()),
                              detail::parse_color_channel(tok[4], scan.line_no()),
                              detail::parse_color_channel(tok[5], scan.line_no())});
  }
  if (cloud.empty()) throw ParseError("no points in input");
  return cloud;
}

/// Parse ASCII PLY. Requires float x,y,z properties on the vertex element;
/// red/green/blue are captured when all three are present; every other
/// scalar property is skipped. Binary PLY and list properties on the vertex
/// element are rejected as unsupported.
inline PointCloud parse_ply_ascii(std::string_view bytes) {
  detail::LineScanner scan(bytes);
  std::vector<std::string_view> tok;
  std::string_view line;

  if (!scan.next(line) || line != "ply")
    throw ParseError("missing 'ply' magic line", 1);

  struct Element {
    std::string name;
    std::uint64_t count = 0;
    std::vector<std::string> properties;  // scalar property names, in order
    bool has_list = false;
  };
  std::vector<Element> elements;
  bool format_seen = false;
  bool header_done = false;

  while (scan.next(line)) {
    detail::split_tokens(line, false, tok);
    if (tok.empty()) continue;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw ParseError("malformed format line", scan.line_no());
      if (tok[1] != "ascii")
        throw UnsupportedFormatError("binary PLY is not supported (" +
                                     std::string(tok[1]) + ")");
      format_seen = true;
    } else if (tok[0] == "element") {
      if (tok.size() < 3)
        throw ParseError("malformed element line", scan.line_no());
      elements.push_back({std::string(tok[1]),
                          detail::parse_count(tok[2], scan.line_no()),
                          {},
                          false});
    } else if (tok[0] == "property") {
      if (elements.empty())
        throw ParseError("property before any element", scan.line_no());
      if (tok.size() < 3)
        throw ParseError("malformed property line", scan.line_no());
      if (tok[1] == "list")
        elements.back().has_list = true;
      else
        elements.back().properties.emplace_back(tok.back());
    } else if (tok[0] == "end_header") {
      header_done = true;
      break;
    } else {
      throw ParseError("unrecognized header line '" + std::string(tok[0]) + "'",
                       scan.line_no());
    }
  }
  if (!header_done) throw ParseError("missing end_header", scan.line_no());
  if (!format_seen) throw ParseError("missing format line", scan.line_no());

  const auto find_prop = [](const Element& e, const char* name) {
    for (std::size_t i = 0; i < e.properties.size(); ++i)
      if (e.properties[i] == name) return static_cast<long>(i);
    return -1L;
  };

  PointCloud cloud;
  bool vertex_seen = false;
  for (const Element& elem : elements) {
    if (elem.name != "vertex") {
      // Not interesting; one data line per instance.
      for (std::uint64_t i = 0; i < elem.count; ++i)
        if (!scan.next_data(line))
          throw ParseError("unexpected end of file in element '" + elem.name + "'",
                           scan.line_no());
      continue;
    }
    vertex_seen = true;
    if (elem.has_list)
      throw UnsupportedFormatError(
          "list property on vertex element is not supported");
    const long ix = find_prop(elem, "x");
    const long iy = find_prop(elem, "y");
    const long iz = find_prop(elem, "z");
    if (ix < 0 || iy < 0 || iz < 0)
      throw DataError("vertex element lacks x/y/z properties");
    const long ir = find_prop(elem, "red");
    const long ig = find_prop(elem, "green");
    const long ib = find_prop(elem, "blue");
    const bool rgb = ir >= 0 && ig >= 0 && ib >= 0;

    cloud.points.reserve(static_cast<std::size_t>(
        std::min<std::uint64_t>(elem.count, 1u << 20)));
    for (std::uint64_t i = 0; i < elem.count; ++i) {
      if (!scan.next_data(line))
        throw ParseError("unexpected end of file in vertex data", scan.line_no());
      detail::split_tokens(line, false, tok);
      if (tok.size() < elem.properties.size())
        throw ParseError("vertex line has " + std::to_string(tok.size()) +
                             " values, expected " +
                             std::to_string(elem.properties.size()),
                         scan.line_no());
      cloud.points.push_back(
          {detail::parse_double(tok[static_cast<std::size_t>(ix)], scan.line_no()),
           detail::parse_double(tok[static_cast<std::size_t>(iy)], scan.line_no()),
           detail::parse_double(tok[static_cast<std::size_t>(iz)], scan.line_no())});
      if (rgb)
        cloud.colors.push_back(
            {detail::parse_color_channel(tok[static_cast<std::size_t>(ir)],
                                         scan.line_no()),
             detail::parse_color_channel(tok[static_cast<std::size_t>(ig)],
                                         scan.line_no()),
             detail::parse_color_channel(tok[static_cast<std::size_t>(ib)],
                                         scan.line_no())});
    }
  }
  if (!vertex_seen) throw DataError("no vertex element in PLY header");
  if (cloud.empty()) throw ParseError("no points in input");
  return cloud;
}

/// Canonical XYZ serialization: one point per line, 9 significant digits,
/// colors appended as integers when present.
inline std::string serialize_xyz(const PointCloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * 32);
  char buf[160];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (cloud.has_colors()) {
      const Rgb& c = cloud.colors[i];
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %d %d %d\n", p.x, p.y,
                    p.z, c.r, c.g, c.b);
    } else {
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.x, p.y, p.z);
    }
    out += buf;
  }
  return out;
}

}  // namespace orthonet

#endif  // ORTHONET_IO_HPP
