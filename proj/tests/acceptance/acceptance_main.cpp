// Acceptance gate: one self-contained check per shipped guarantee, one
// PASS/FAIL line each, exit code = number of failures. No test framework so
// the binary stays runnable anywhere the library builds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "orthonet/orthonet.hpp"
#include "support/synthetic.hpp"

using namespace orthonet;
namespace syn = synthetic;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("%s %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  if (!ok) ++failures;
}

DescribeConfig default_describe() {
  DescribeConfig dc;
  dc.degeneracy = DegeneracyPolicy::tie_break;
  return dc;
}

// ---- 1. scale invariance ----------------------------------------------------

void criterion_scale() {
  Timer timer;
  const DescribeConfig dc = default_describe();
  CounterRng rng(2024, 1);
  double worst = 0.0;
  int checked = 0;
  for (std::uint64_t s = 1; s <= 50 && timer.seconds() < 9.0; ++s) {
    for (const PointCloud& base :
         {syn::tadpole(s, 4000), syn::blob_mixture(s, 4000)}) {
      const double k = std::pow(10.0, syn::uniform(rng, -1.0, 1.0));
      PointCloud scaled = base;
      syn::scale(scaled, k);
      const FeatureVector a = describe_object(base, dc).descriptor.feature;
      const FeatureVector b = describe_object(scaled, dc).descriptor.feature;
      for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
      ++checked;
    }
  }
  const double t = timer.seconds();
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "scale invariance: %d cloud pairs, max per-element delta %.3g, "
                "%.2f s",
                checked, worst, t);
  report(1, checked == 100 && worst <= 1e-9 && t < 10.0, buf);
}

// ---- 2/3. rigid-motion and mirroring invariance -----------------------------

bool passes_filters(const PointCloud& cloud, const DescribeResult& ref) {
  if (std::abs(ref.sign.r_x) < 0.05 || std::abs(ref.sign.r_y) < 0.05)
    return false;
  const EigenBasis basis = eigen_decompose_sym3(covariance(cloud, centroid(cloud)));
  const double top = std::max(basis.lambda[0], 1e-30);
  return (basis.lambda[0] - basis.lambda[1]) / top >= 1e-3 &&
         (basis.lambda[1] - basis.lambda[2]) / top >= 1e-3;
}

void criterion_rigid_and_mirror() {
  Timer timer;
  const DescribeConfig dc = default_describe();

  std::vector<PointCloud> clouds;
  std::vector<DescribeResult> refs;
  for (std::uint64_t s = 1; clouds.size() < 50 && s < 200; ++s) {
    PointCloud c = syn::tadpole(s, 6000);
    DescribeResult r;
    try {
      r = describe_object(c, dc);
    } catch (const Error&) {
      continue;
    }
    if (!passes_filters(c, r)) continue;
    clouds.push_back(std::move(c));
    refs.push_back(std::move(r));
  }

  double worst_rigid = 0.0;
  int rigid_failures = 0;
  CounterRng rng(2024, 2);
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    for (int t = 0; t < 50; ++t) {
      PointCloud moved = clouds[i];
      syn::random_rigid_transform(moved, rng);
      try {
        const DescribeResult got = describe_object(moved, dc);
        const double d = chi2_distance(refs[i].descriptor.feature,
                                       got.descriptor.feature);
        worst_rigid = std::max(worst_rigid, d);
        if (d > 0.02) ++rigid_failures;
      } catch (const Error&) {
        ++rigid_failures;
      }
    }
  }
  const double t2 = timer.seconds();
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "rigid-motion invariance: %zu clouds x 50 transforms, worst "
                "chi2 %.4g, %.2f s",
                clouds.size(), worst_rigid, t2);
  report(2, clouds.size() == 50 && rigid_failures == 0 && t2 < 60.0, buf);

  double worst_mirror = 0.0;
  int mirror_failures = 0;
  int flipped = 0;
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    PointCloud mirrored = clouds[i];
    syn::mirror_x(mirrored);
    try {
      const DescribeResult got = describe_object(mirrored, dc);
      if ((got.sign.s < 0.0) != (refs[i].sign.s < 0.0)) ++flipped;
      const double d =
          chi2_distance(refs[i].descriptor.feature, got.descriptor.feature);
      worst_mirror = std::max(worst_mirror, d);
      if (d > 0.02) ++mirror_failures;
    } catch (const Error&) {
      ++mirror_failures;
    }
  }
  std::snprintf(buf, sizeof(buf),
                "mirroring: %zu reflections (%d flipped s), worst chi2 %.4g",
                clouds.size(), flipped, worst_mirror);
  report(3, mirror_failures == 0 && !clouds.empty(), buf);
}

// ---- 4. distance axioms -----------------------------------------------------

void criterion_distances() {
  CounterRng rng(2024, 4);
  bool ok = true;
  std::string why = "chi2/js axioms over 10^4 pairs + frozen hand values";

  for (int trial = 0; trial < 10000 && ok; ++trial) {
    const std::size_t d = 4 + rng.next_below(29);
    FeatureVector p(d), q(d);
    for (std::size_t i = 0; i < d; ++i) {
      p[i] = rng.next_below(4) == 0 ? 0.0 : rng.next_double();
      q[i] = rng.next_below(4) == 0 ? 0.0 : rng.next_double();
    }
    p[0] += 0.05;  // keep sums positive for js
    q[0] += 0.05;

    const double c_pq = chi2_distance(p, q);
    const double c_qp = chi2_distance(q, p);
    const double j_pq = js_distance(p, q);
    const double j_qp = js_distance(q, p);
    if (c_pq < 0.0 || std::abs(c_pq - c_qp) > 1e-12) ok = false;
    if (chi2_distance(p, p) != 0.0) ok = false;
    if (j_pq < 0.0 || j_pq > 1.0 + 1e-12 || std::abs(j_pq - j_qp) > 1e-12)
      ok = false;
    if (js_distance(p, p) != 0.0) ok = false;
    if (p != q && c_pq == 0.0) ok = false;  // identity of indiscernibles
  }

  const FeatureVector e1{1.0, 0.0}, e2{0.0, 1.0}, half{0.5, 0.5};
  if (std::abs(chi2_distance(e1, e2) - 1.0) > 1e-12) ok = false;
  if (std::abs(js_distance(e1, e2) - 1.0) > 1e-12) ok = false;
  if (chi2_distance(half, half) != 0.0) ok = false;
  if (std::abs(chi2_distance(half, e1) - 1.0 / 3.0) > 1e-12) ok = false;
  report(4, ok, why);
}

// ---- 5. 1-NN oracle equivalence ---------------------------------------------

void criterion_oracle() {
  CounterRng rng(2024, 5);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 4 + rng.next_below(13);
    const std::size_t labels = 1 + rng.next_below(10);
    const DistanceKind kind =
        trial % 2 == 0 ? DistanceKind::chi2 : DistanceKind::js;

    CategoryStore store;
    store.distance = kind;
    for (std::size_t l = 0; l < labels; ++l) {
      const std::string label = "cat" + std::to_string(rng.next_below(900));
      const std::size_t instances = 1 + rng.next_below(10);
      for (std::size_t k = 0; k < instances; ++k) {
        ObjectDescriptor d;
        d.embedder_id = "raw:p4";
        d.feature.resize(dim);
        for (double& v : d.feature) v = 0.02 + rng.next_double();
        teach(store, label, d);
      }
    }

    ObjectDescriptor query;
    query.embedder_id = "raw:p4";
    query.feature.resize(dim);
    for (double& v : query.feature) v = 0.02 + rng.next_double();

    const Classification got = classify(store, query);

    double best = std::numeric_limits<double>::infinity();
    std::string best_label;
    for (const auto& [label, instances] : store.categories)
      for (const ObjectDescriptor& inst : instances) {
        const double d = feature_distance(query.feature, inst.feature, kind);
        if (d < best) {
          best = d;
          best_label = label;
        }
      }
    if (!got.label || *got.label != best_label || got.ocd != best) ++mismatches;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "classify vs exhaustive 1-NN: %d mismatches / 1000 stores",
                mismatches);
  report(5, mismatches == 0, buf);
}

// ---- 6. eigen kernel --------------------------------------------------------

void criterion_eigen() {
  CounterRng rng(2024, 6);
  double worst_residual = 0.0;
  bool sorted_ok = true, handed_ok = true;
  for (int trial = 0; trial < 10000; ++trial) {
    const double scale = std::pow(10.0, syn::uniform(rng, -2.0, 2.0));
    SymMat3 m;
    m.a11 = syn::gauss(rng, scale);
    m.a12 = syn::gauss(rng, scale);
    m.a13 = syn::gauss(rng, scale);
    m.a22 = syn::gauss(rng, scale);
    m.a23 = syn::gauss(rng, scale);
    m.a33 = syn::gauss(rng, scale);

    const EigenBasis basis = eigen_decompose_sym3(m);
    const double rho = std::max({std::abs(basis.lambda[0]),
                                 std::abs(basis.lambda[1]),
                                 std::abs(basis.lambda[2])});
    for (int i = 0; i < 3; ++i) {
      const Vec3 r = m.apply(basis.v[i]) - basis.lambda[i] * basis.v[i];
      worst_residual = std::max(worst_residual, r.norm() / (1.0 + rho));
    }
    if (!(basis.lambda[0] >= basis.lambda[1] &&
          basis.lambda[1] >= basis.lambda[2]))
      sorted_ok = false;
    if (basis.v[0].cross(basis.v[1]).dot(basis.v[2]) <= 0.0) handed_ok = false;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "eigen kernel: 10^4 matrices, worst residual %.3g, sorted=%d, "
                "right-handed=%d",
                worst_residual, sorted_ok ? 1 : 0, handed_ok ? 1 : 0);
  report(6, worst_residual <= 1e-9 && sorted_ok && handed_ok, buf);
}

// ---- 7. protocol determinism and termination --------------------------------

LabeledDataset separable_dataset(std::size_t labels, std::size_t per_label,
                                 std::uint64_t seed) {
  CounterRng rng(seed, 7);
  LabeledDataset data;
  for (std::size_t l = 0; l < labels; ++l) {
    const std::string label(1, static_cast<char>('a' + l));
    for (std::size_t k = 0; k < per_label; ++k) {
      ObjectDescriptor d;
      d.embedder_id = "synthetic";
      d.feature.assign(2 * labels, 0.01);
      d.feature[2 * l] = 1.0 + 0.05 * rng.next_double();
      d.feature[2 * l + 1] = 0.5 + 0.05 * rng.next_double();
      data[label].push_back({label + "/" + std::to_string(k), d});
    }
  }
  return data;
}

void criterion_protocol() {
  bool ok = true;
  std::string detail;

  const LabeledDataset data = separable_dataset(4, 30, 99);
  ProtocolConfig pc;

  const ProtocolResult a = run_simulated_teacher(data, pc, 42);
  const ProtocolResult b = run_simulated_teacher(data, pc, 42);
  if (serialize_log(a.log) != serialize_log(b.log)) {
    ok = false;
    detail += " logs-not-reproducible";
  }

  const ClassifyFn perfect = [](const CategoryStore&, const DatasetItem&,
                                const std::string& truth) {
    Classification c;
    c.label = truth;
    c.ocd = 0.0;
    return c;
  };
  const LabeledDataset big = separable_dataset(6, 25, 123);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProtocolResult r = run_simulated_teacher(big, pc, seed, perfect);
    const Metrics m = compute_metrics(r.log, r.store);
    if (m.tlc != 6 || r.log.stop != StopCondition::lack_of_data) {
      ok = false;
      detail += " perfect-stub-seed" + std::to_string(seed);
    }
  }

  // Identical descriptors: ties always predict the first label, so once "a"
  // runs out of instances no sliding window can clear tau and the run must
  // hit the breakpoint while "b" still has instances to ask about.
  LabeledDataset constant;
  const auto add_constant = [&constant](const std::string& label, int count) {
    for (int k = 0; k < count; ++k) {
      ObjectDescriptor d;
      d.embedder_id = "synthetic";
      d.feature = {0.5, 0.5};
      constant[label].push_back({label + "/" + std::to_string(k), d});
    }
  };
  add_constant("a", 13);
  add_constant("b", 110);
  add_constant("c", 60);
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const ProtocolResult c = run_simulated_teacher(constant, pc, seed);
    const Metrics m = compute_metrics(c.log, c.store);
    if (c.log.stop != StopCondition::breakpoint_reached || m.tlc != 2) {
      ok = false;
      detail += " no-breakpoint-seed" + std::to_string(seed);
    }
  }

  report(7, ok,
         "protocol: byte-identical logs, perfect stub reaches all categories "
         "with lack_of_data on 10 seeds, constant descriptors hit the "
         "breakpoint" +
             detail);
}

// ---- 8. synthetic end-to-end recognition ------------------------------------

void criterion_end_to_end() {
  Timer timer;
  const DescribeConfig dc = default_describe();
  const RawBlockEmbedder embedder(15);

  LabeledDataset train, test;
  for (std::size_t family = 0; family < 6; ++family) {
    const std::string label = syn::kFamilyNames[family];
    for (int k = 0; k < 20; ++k) {
      train[label].push_back(
          {label + "/train" + std::to_string(k),
           describe_object(syn::family_instance(family, 1000 + k), dc, embedder)
               .descriptor});
      test[label].push_back(
          {label + "/test" + std::to_string(k),
           describe_object(syn::family_instance(family, 5000 + k), dc, embedder)
               .descriptor});
    }
  }
  const OfflineReport report_ = offline_eval(train, test, DistanceKind::chi2);
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "end-to-end recognition: 6 families, 20/20 split, AIA %.3f "
                "(ACA %.3f), %.2f s",
                report_.aia, report_.aca, timer.seconds());
  report(8, report_.aia >= 0.9, buf);
}

// ---- 9. parser goldens and fuzz ---------------------------------------------

const char* kOffFixture =
    "OFF\n"
    "# unit cube corners, one quad + one triangle\n"
    "8 2 0\n"
    "0 0 0\n1 0 0\n1 1 0\n0 1 0\n"
    "0 0 1\n1 0 1\n1 1 1\n0 1 1\n"
    "4 0 1 2 3\n"
    "3 4 5 6\n";

const char* kPlyFixture =
    "ply\r\n"
    "format ascii 1.0\r\n"
    "comment colored triangle\r\n"
    "element vertex 3\r\n"
    "property float x\r\n"
    "property float y\r\n"
    "property float z\r\n"
    "property uchar red\r\n"
    "property uchar green\r\n"
    "property uchar blue\r\n"
    "element face 1\r\n"
    "property list uchar int vertex_indices\r\n"
    "end_header\r\n"
    "0 0 0 255 0 0\r\n"
    "1 0 0 0 255 0\r\n"
    "0 1 0 0 0 255\r\n"
    "3 0 1 2\r\n";

const char* kXyzFixture =
    "# three points, comma separated variant included\n"
    "0.5 -1.25 3\n"
    "1,2,3\n"
    "-0.125 0 42\n";

void criterion_parsers() {
  bool ok = true;
  std::string detail;

  try {
    const TriangleMesh mesh = parse_off(kOffFixture);
    if (mesh.vertices.size() != 8 || mesh.faces.size() != 3) {
      ok = false;
      detail += " off-shape";
    }
    if (mesh.vertices[6] != Vec3{1, 1, 1}) {
      ok = false;
      detail += " off-vertex";
    }
  } catch (const Error&) {
    ok = false;
    detail += " off-threw";
  }

  try {
    const PointCloud ply = parse_ply_ascii(kPlyFixture);
    if (ply.size() != 3 || !ply.has_colors() || ply.colors[2].b != 255 ||
        ply.points[1] != Vec3{1, 0, 0}) {
      ok = false;
      detail += " ply-content";
    }
  } catch (const Error&) {
    ok = false;
    detail += " ply-threw";
  }

  try {
    const PointCloud xyz = parse_xyz(kXyzFixture);
    const PointCloud again = parse_xyz(serialize_xyz(xyz));
    if (xyz.size() != 3 || again.points != xyz.points) {
      ok = false;
      detail += " xyz-roundtrip";
    }
  } catch (const Error&) {
    ok = false;
    detail += " xyz-threw";
  }

  // Fuzz: random byte strings, sometimes with format-plausible prefixes, must
  // only ever throw the library's own error type.
  CounterRng rng(2024, 9);
  int survived = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    std::string bytes;
    const std::uint64_t kind = rng.next_below(4);
    if (kind == 1) bytes = "OFF\n";
    if (kind == 2) bytes = "ply\nformat ascii 1.0\n";
    if (kind == 3) bytes = "orthonet-store 1\n";
    const std::size_t len = rng.next_below(256);
    for (std::size_t i = 0; i < len; ++i)
      bytes.push_back(static_cast<char>(rng.next_below(256)));

    try {
      parse_off(bytes);
    } catch (const Error&) {
    }
    try {
      parse_xyz(bytes);
    } catch (const Error&) {
    }
    try {
      parse_ply_ascii(bytes);
    } catch (const Error&) {
    }
    try {
      parse_external_embeddings(bytes);
    } catch (const Error&) {
    }
    try {
      load_store(bytes);
    } catch (const Error&) {
    }
    ++survived;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "parsers: goldens%s, fuzz survived %d/100000 inputs",
                detail.empty() ? " ok" : detail.c_str(), survived);
  report(9, ok && survived == 100000, buf);
}

}  // namespace

int main() {
  criterion_scale();
  criterion_rigid_and_mirror();
  criterion_distances();
  criterion_oracle();
  criterion_eigen();
  criterion_protocol();
  criterion_end_to_end();
  criterion_parsers();
  std::printf("acceptance: %d/9 criteria passed\n", 9 - failures);
  return failures;
}
