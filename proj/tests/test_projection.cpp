#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "orthonet/frame.hpp"
#include "orthonet/projection.hpp"
#include "support/synthetic.hpp"

using namespace orthonet;
namespace syn = synthetic;

namespace {

// Tadpole expressed in its own reference frame: the shape every sign test
// wants, dense head on one side, bent tail on the other.
PointCloud local_tadpole(std::uint64_t seed) {
  const PointCloud world = syn::tadpole(seed);
  return transform_to_frame(
      world, build_reference_frame(world, DegeneracyPolicy::tie_break));
}

void flip_axes(PointCloud& cloud, double sx, double sy, double sz) {
  for (auto& p : cloud.points) {
    p.x *= sx;
    p.y *= sy;
    p.z *= sz;
  }
}

void require_views_close(const ProjectedView& a, const ProjectedView& b,
                         double tol) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.points[i].alpha - b.points[i].alpha));
    worst = std::max(worst, std::abs(a.points[i].beta - b.points[i].beta));
  }
  CHECK(worst < tol);
}

}  // namespace

TEST_CASE("largest bounding box edge") {
  PointCloud c;
  c.points = {{0, 0, 0}, {1, 0.5, 0.2}};
  CHECK(aabb_side(c) == 1.0);

  c.points = {{-1, 0, 0}, {2, 1, 1}};
  CHECK(aabb_side(c) == 3.0);

  for (auto& p : c.points) p = p * 2.5;
  CHECK(aabb_side(c) == 7.5);

  CHECK_THROWS_AS(aabb_side(PointCloud{}), DataError);
  c.points = {{1, 1, 1}, {1, 1, 1}};
  CHECK_THROWS_AS(aabb_side(c), NumericError);
}

TEST_CASE("projection drops one axis per view, shifts and clamps") {
  PointCloud c;
  c.points = {{0, 0, 0}, {0.2, -0.3, 0.4}, {5, 5, -5}};
  const ViewSet views = project_views(c, 2.0);

  CHECK(views.extent == 2.0);
  CHECK(views.side.plane == ViewPlane::XoZ);
  CHECK(views.front.plane == ViewPlane::YoZ);
  CHECK(views.top.plane == ViewPlane::XoY);

  // the origin lands at the plane center
  CHECK(views.side.points[0].alpha == 1.0);
  CHECK(views.side.points[0].beta == 1.0);
  CHECK(views.front.points[0].alpha == 1.0);
  CHECK(views.top.points[0].beta == 1.0);

  // side = (x, z), front = (y, z), top = (x, y)
  CHECK(views.side.points[1].alpha == Catch::Approx(1.2));
  CHECK(views.side.points[1].beta == Catch::Approx(1.4));
  CHECK(views.front.points[1].alpha == Catch::Approx(0.7));
  CHECK(views.front.points[1].beta == Catch::Approx(1.4));
  CHECK(views.top.points[1].alpha == Catch::Approx(1.2));
  CHECK(views.top.points[1].beta == Catch::Approx(0.7));

  // outliers clamp to the plane boundary
  CHECK(views.side.points[2].alpha == 2.0);
  CHECK(views.side.points[2].beta == 0.0);

  CHECK_THROWS_AS(project_views(PointCloud{}, 1.0), DataError);
  CHECK_THROWS_AS(project_views(c, 0.0), NumericError);
}

TEST_CASE("pearson correlation of a 2-D scatter") {
  CHECK(pearson({{0, 0}, {1, 1}, {2, 2}}) == Catch::Approx(1.0));
  CHECK(pearson({{0, 2}, {1, 1}, {2, 0}}) == Catch::Approx(-1.0));
  CHECK(pearson({{0, 0}, {0, 1}, {1, 0}, {1, 1}}) == 0.0);   // square corners
  CHECK(pearson({{0, 0}, {1, 0}, {2, 0}}) == 0.0);           // constant beta
  CHECK(pearson({{3, 1}, {3, 5}}) == 0.0);                   // constant alpha
  CHECK_THROWS_AS(pearson(std::vector<ViewPoint>{{1, 1}}), DataError);
}

TEST_CASE("silhouette correlation uses occupied cells once each") {
  ProjectedView v;
  v.extent = 1.0;
  v.points = {{0.1, 0.1}, {0.100001, 0.100001}, {0.5, 0.5}, {0.9, 0.9}};
  CHECK(detail::silhouette_pearson(v) == Catch::Approx(1.0));

  v.points = {{0.1, 0.9}, {0.9, 0.1}};
  CHECK(detail::silhouette_pearson(v) == Catch::Approx(-1.0));

  v.points = {{0.5, 0.5}, {0.500001, 0.500001}};  // one occupied cell
  CHECK(detail::silhouette_pearson(v) == 0.0);
}

TEST_CASE("sign disambiguation is idempotent and fixes the third moment") {
  PointCloud local = local_tadpole(11);
  const double l = aabb_side(local);
  ViewSet views = project_views(local, l);
  disambiguate_sign(views);

  CHECK(detail::third_moment(views) >= 0.0);

  ViewSet again = views;
  const SignResolution second = disambiguate_sign(again);
  CHECK(second.r_x >= 0.0);
  CHECK(second.r_y >= 0.0);
  CHECK_FALSE(second.mirrored);
  CHECK_FALSE(second.rotated180);
  require_views_close(views.side, again.side, 1e-12);
  require_views_close(views.front, again.front, 1e-12);
  require_views_close(views.top, again.top, 1e-12);
}

TEST_CASE("all eight axis-sign flips canonicalize to the same views") {
  const PointCloud local = local_tadpole(12);
  const double l = aabb_side(local);

  ViewSet reference = project_views(local, l);
  const SignResolution ref_sign = disambiguate_sign(reference);
  REQUIRE(std::abs(ref_sign.r_x) >= 0.05);  // the shape carries a clear signal
  REQUIRE(std::abs(ref_sign.r_y) >= 0.05);

  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0})
      for (double sz : {1.0, -1.0}) {
        PointCloud flipped = local;
        flip_axes(flipped, sx, sy, sz);
        CHECK(aabb_side(flipped) == l);

        ViewSet views = project_views(flipped, l);
        const SignResolution sign = disambiguate_sign(views);
        INFO("signs " << sx << " " << sy << " " << sz);
        require_views_close(views.side, reference.side, 1e-9);
        require_views_close(views.front, reference.front, 1e-9);
        require_views_close(views.top, reference.top, 1e-9);

        // s = r_x * r_y flips exactly when the alpha axes of the two
        // correlated views disagree in sign; the z factors cancel
        CHECK((sign.s < 0.0) == ((sx * sy < 0.0) != (ref_sign.s < 0.0)));
      }
}

TEST_CASE("rasterization: placement, mass, modes") {
  ProjectedView v;
  v.extent = 2.0;
  v.points = {{1.5, 1.5}};
  const ProjectionImage img = rasterize(v, 2);
  CHECK(img.at(1, 1) == 1.0);
  CHECK(img.at(0, 0) == 0.0);

  // boundary values land in the last bin, not out of range
  v.points = {{2.0, 0.0}};
  CHECK(rasterize(v, 2).at(1, 0) == 1.0);

  // density: counts normalized by the point total
  v.points = {{0.1, 0.1}, {0.2, 0.2}, {1.7, 1.7}};
  const ProjectionImage dens = rasterize(v, 2);
  CHECK(dens.at(0, 0) == Catch::Approx(2.0 / 3.0));
  CHECK(dens.at(1, 1) == Catch::Approx(1.0 / 3.0));

  // occupancy: same input, equal weight per occupied cell
  const ProjectionImage occ = rasterize(v, 2, BinMode::occupancy);
  CHECK(occ.at(0, 0) == 0.5);
  CHECK(occ.at(1, 1) == 0.5);

  CHECK_THROWS_AS(rasterize(v, 1), DataError);
  v.points.clear();
  CHECK_THROWS_AS(rasterize(v, 2), DataError);
}

TEST_CASE("rasterized mass sums to one and spreads uniformly") {
  CounterRng rng(31, 0);
  ProjectedView v;
  v.extent = 1.0;
  v.points.reserve(1000000);
  for (int i = 0; i < 1000000; ++i)
    v.points.push_back({rng.next_double(), rng.next_double()});

  const ProjectionImage img = rasterize(v, 5);
  double sum = 0.0;
  for (double b : img.bins) sum += b;
  CHECK(sum == Catch::Approx(1.0).margin(1e-9));

  // each of the 25 bins holds p = 0.04 of the mass, +/- 3 binomial sigmas
  const double sigma = std::sqrt(0.04 * 0.96 / 1000000.0);
  for (double b : img.bins) CHECK(std::abs(b - 0.04) < 3.5 * sigma);
}

TEST_CASE("PGM rendering: beta rows top-down, max rescaled to 255") {
  ProjectionImage img;
  img.resolution = 2;
  img.bins = {0.1, 0.2, 0.3, 0.4};  // at(0,0) at(0,1) at(1,0) at(1,1)
  CHECK(to_pgm(img) == "P2\n2 2\n255\n128 255\n64 191\n");

  img.bins = {0, 0, 0, 0};  // all-zero image stays black
  CHECK(to_pgm(img) == "P2\n2 2\n255\n0 0\n0 0\n");
}

TEST_CASE("float record is little-endian float32 in bin order") {
  ProjectionImage img;
  img.resolution = 2;
  img.bins = {1.0, 0.5, 0.25, 0.0};
  const std::string rec = to_float_record(img);
  REQUIRE(rec.size() == 16);
  const unsigned char expect[16] = {0, 0, 0x80, 0x3F, 0, 0, 0,    0x3F,
                                    0, 0, 0x80, 0x3E, 0, 0, 0,    0};
  for (int i = 0; i < 16; ++i)
    CHECK(static_cast<unsigned char>(rec[i]) == expect[i]);
}
