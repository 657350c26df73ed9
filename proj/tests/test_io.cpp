#include <catch2/catch_amalgamated.hpp>

#include "orthonet/io.hpp"

using namespace orthonet;

namespace {

const char* kCubeOff =
    "OFF\n"
    "# unit cube, quad bottom + one triangle\n"
    "8 2 0\n"
    "0 0 0\n1 0 0\n1 1 0\n0 1 0\n"
    "0 0 1\n1 0 1\n1 1 1\n0 1 1\n"
    "4 0 1 2 3\n"
    "3 4 5 6\n";

}  // namespace

TEST_CASE("OFF: vertices, fan triangulation, comments") {
  const TriangleMesh mesh = parse_off(kCubeOff);
  REQUIRE(mesh.vertices.size() == 8);
  REQUIRE(mesh.faces.size() == 3);  // quad -> 2 triangles, plus 1
  CHECK(mesh.vertices[0] == Vec3{0, 0, 0});
  CHECK(mesh.vertices[6] == Vec3{1, 1, 1});
  CHECK(mesh.faces[0] == std::array<std::uint32_t, 3>{0, 1, 2});
  CHECK(mesh.faces[1] == std::array<std::uint32_t, 3>{0, 2, 3});
  CHECK(mesh.faces[2] == std::array<std::uint32_t, 3>{4, 5, 6});
}

TEST_CASE("OFF: counts glued to the magic line") {
  const TriangleMesh mesh = parse_off("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  CHECK(mesh.vertices.size() == 3);
  CHECK(mesh.faces.size() == 1);
}

TEST_CASE("OFF: CRLF and missing trailing newline") {
  const TriangleMesh mesh =
      parse_off("OFF\r\n3 1 0\r\n0 0 0\r\n1 0 0\r\n0 1 0\r\n3 0 1 2");
  CHECK(mesh.vertices.size() == 3);
  CHECK(mesh.faces.size() == 1);
}

TEST_CASE("OFF: malformed inputs carry line numbers") {
  CHECK_THROWS_AS(parse_off(""), ParseError);
  CHECK_THROWS_AS(parse_off("PLY\n"), ParseError);
  CHECK_THROWS_WITH(parse_off("OFF\n2 0 0\n0 0 0\n"),
                    Catch::Matchers::ContainsSubstring("line 3"));
  CHECK_THROWS_WITH(parse_off("OFF\n1 0 0\n0 0 x\n"),
                    Catch::Matchers::ContainsSubstring("'x'"));
  // index past the vertex count
  CHECK_THROWS_WITH(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n"),
                    Catch::Matchers::ContainsSubstring("out of range"));
  // repeated vertex in a face
  CHECK_THROWS_WITH(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 1\n"),
                    Catch::Matchers::ContainsSubstring("degenerate"));
  // fewer indices than promised
  CHECK_THROWS_AS(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n2 0 1\n"),
                  ParseError);
}

TEST_CASE("XYZ: plain, comma separated, colored") {
  const PointCloud plain = parse_xyz("0.5 -1.25 3\n1,2,3\n# skip\n\n-0.125 0 42\n");
  REQUIRE(plain.size() == 3);
  CHECK_FALSE(plain.has_colors());
  CHECK(plain.points[1] == Vec3{1, 2, 3});

  const PointCloud colored = parse_xyz("0 0 0 255 128 0\r\n1 1 1 0 0 255\r\n");
  REQUIRE(colored.size() == 2);
  REQUIRE(colored.has_colors());
  CHECK(colored.colors[0] == Rgb{255, 128, 0});
  CHECK(colored.colors[1] == Rgb{0, 0, 255});
}

TEST_CASE("XYZ: malformed inputs") {
  CHECK_THROWS_AS(parse_xyz(""), ParseError);
  CHECK_THROWS_AS(parse_xyz("# only comments\n"), ParseError);
  CHECK_THROWS_WITH(parse_xyz("1 2\n"),
                    Catch::Matchers::ContainsSubstring("3 (xyz) or 6"));
  CHECK_THROWS_WITH(parse_xyz("1 2 3\n1 2 3 4 5 6\n"),
                    Catch::Matchers::ContainsSubstring("mixed"));
  CHECK_THROWS_WITH(parse_xyz("1 2 3 300 0 0\n"),
                    Catch::Matchers::ContainsSubstring("[0,255]"));
  CHECK_THROWS_WITH(parse_xyz("1 2 nan\n"),
                    Catch::Matchers::ContainsSubstring("non-finite"));
  CHECK_THROWS_AS(parse_xyz("1 2 3x\n"), ParseError);
}

TEST_CASE("XYZ: serialization round-trips 9-significant-digit values") {
  const PointCloud cloud = parse_xyz("0.5 -1.25 3\n0.000244140625 1e+20 -7\n");
  const std::string text = serialize_xyz(cloud);
  CHECK(text == "0.5 -1.25 3\n0.000244140625 1e+20 -7\n");
  const PointCloud again = parse_xyz(text);
  CHECK(again.points == cloud.points);

  PointCloud colored;
  colored.points.push_back({1, 2, 3});
  colored.colors.push_back({10, 20, 30});
  CHECK(serialize_xyz(colored) == "1 2 3 10 20 30\n");
  CHECK(parse_xyz(serialize_xyz(colored)).colors == colored.colors);
}

TEST_CASE("PLY: vertices with colors, skipped properties and elements") {
  const char* text =
      "ply\r\n"
      "format ascii 1.0\r\n"
      "comment made by hand\r\n"
      "element vertex 3\r\n"
      "property float x\r\n"
      "property float y\r\n"
      "property float z\r\n"
      "property float confidence\r\n"
      "property uchar red\r\n"
      "property uchar green\r\n"
      "property uchar blue\r\n"
      "element face 1\r\n"
      "property list uchar int vertex_indices\r\n"
      "end_header\r\n"
      "0 0 0 0.5 255 0 0\r\n"
      "1 0 0 0.25 0 255 0\r\n"
      "0 1 0 1 0 0 255\r\n"
      "3 0 1 2\r\n";
  const PointCloud cloud = parse_ply_ascii(text);
  REQUIRE(cloud.size() == 3);
  REQUIRE(cloud.has_colors());
  CHECK(cloud.points[1] == Vec3{1, 0, 0});
  CHECK(cloud.colors[2] == Rgb{0, 0, 255});
}

TEST_CASE("PLY: colorless when any channel is missing") {
  const char* text =
      "ply\n"
      "format ascii 1.0\n"
      "element vertex 1\n"
      "property float x\n"
      "property float y\n"
      "property float z\n"
      "property uchar red\n"
      "end_header\n"
      "1 2 3 200\n";
  const PointCloud cloud = parse_ply_ascii(text);
  CHECK(cloud.size() == 1);
  CHECK_FALSE(cloud.has_colors());
}

TEST_CASE("PLY: rejections") {
  CHECK_THROWS_AS(parse_ply_ascii("OFF\n"), ParseError);
  CHECK_THROWS_AS(
      parse_ply_ascii("ply\nformat binary_little_endian 1.0\nend_header\n"),
      UnsupportedFormatError);
  CHECK_THROWS_AS(
      parse_ply_ascii("ply\nformat ascii 1.0\nelement vertex 1\n"
                      "property list uchar int x\nend_header\n0\n"),
      UnsupportedFormatError);
  CHECK_THROWS_AS(parse_ply_ascii("ply\nformat ascii 1.0\nelement vertex 1\n"
                                  "property float x\nproperty float y\n"
                                  "end_header\n1 2\n"),
                  DataError);  // no z
  CHECK_THROWS_WITH(parse_ply_ascii("ply\nformat ascii 1.0\nbogus line\n"),
                    Catch::Matchers::ContainsSubstring("bogus"));
  CHECK_THROWS_AS(parse_ply_ascii("ply\nformat ascii 1.0\n"), ParseError);
  // truncated vertex data
  CHECK_THROWS_AS(parse_ply_ascii("ply\nformat ascii 1.0\nelement vertex 2\n"
                                  "property float x\nproperty float y\n"
                                  "property float z\nend_header\n1 2 3\n"),
                  ParseError);
}
