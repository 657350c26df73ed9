#ifndef ORTHONET_LEARNER_HPP
#define ORTHONET_LEARNER_HPP

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orthonet/embedding.hpp"
#include "orthonet/types.hpp"

namespace orthonet {

enum class DistanceKind { chi2, js };

inline const char* distance_name(DistanceKind k) {
  return k == DistanceKind::chi2 ? "chi2" : "js";
}

inline DistanceKind parse_distance(std::string_view name) {
  if (name == "chi2") return DistanceKind::chi2;
  if (name == "js") return DistanceKind::js;
  throw DataError("unknown distance '" + std::string(name) + "'");
}

namespace detail {

inline void check_nonnegative(const FeatureVector& v, const char* who) {
  for (double x : v) {
    if (!std::isfinite(x))
      throw DataError(std::string(who) + ": non-finite feature value");
    if (x < 0.0) throw DataError(std::string(who) + ": negative feature value");
  }
}

}  // namespace detail

/// Chi-squared histogram distance: 0.5 * sum (P_i-Q_i)^2 / (P_i+Q_i), with
/// 0/0 terms contributing 0.
inline double chi2_distance(const FeatureVector& p, const FeatureVector& q) {
  if (p.size() != q.size())
    throw DataError("chi2: dimension mismatch");
  detail::check_nonnegative(p, "chi2");
  detail::check_nonnegative(q, "chi2");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double s = p[i] + q[i];
    if (s > 0.0) {
      const double d = p[i] - q[i];
      acc += d * d / s;
    }
  }
  return 0.5 * acc;
}

/// Jensen-Shannon divergence with base-2 logs over the sum-normalized
/// inputs; lands in [0, 1], 0 log 0 taken as 0.
inline double js_distance(const FeatureVector& p, const FeatureVector& q) {
  if (p.size() != q.size())
    throw DataError("js: dimension mismatch");
  detail::check_nonnegative(p, "js");
  detail::check_nonnegative(q, "js");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
  }
  if (!(sp > 0.0) || !(sq > 0.0))
    throw DataError("js: zero-sum vector cannot be normalized");

  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p[i] / sp;
    const double b = q[i] / sq;
    const double m = 0.5 * (a + b);
    if (a > 0.0) acc += 0.5 * a * std::log2(a / m);
    if (b > 0.0) acc += 0.5 * b * std::log2(b / m);
  }
  return std::max(acc, 0.0);
}

inline double feature_distance(const FeatureVector& p, const FeatureVector& q,
                               DistanceKind kind) {
  return kind == DistanceKind::chi2 ? chi2_distance(p, q) : js_distance(p, q);
}

/// Instance-based category model: a category is exactly the list of
/// descriptors taught for it. Embedder id, dimension and pooling are adopted
/// from the first descriptor and enforced afterwards.
struct CategoryStore {
  std::map<std::string, std::vector<ObjectDescriptor>> categories;
  std::string embedder_id;
  std::size_t dimension = 0;
  PoolingMode pooling = PoolingMode::avg;
  DistanceKind distance = DistanceKind::chi2;

  bool empty() const { return categories.empty(); }
  std::size_t category_count() const { return categories.size(); }
  std::size_t instance_count() const {
    std::size_t n = 0;
    for (const auto& [label, instances] : categories) n += instances.size();
    return n;
  }
};

/// Store one more instance under the label; creates the category if new.
inline void teach(CategoryStore& store, const std::string& label,
                  const ObjectDescriptor& descriptor) {
  if (label.empty()) throw DataError("category label must be non-empty");
  if (descriptor.feature.empty())
    throw DataError("descriptor has empty feature vector");
  detail::check_nonnegative(descriptor.feature, "teach");

  if (store.empty()) {
    store.embedder_id = descriptor.embedder_id;
    store.dimension = descriptor.dimension();
    store.pooling = descriptor.pooling;
  } else {
    if (descriptor.embedder_id != store.embedder_id)
      throw DataError("descriptor embedder '" + descriptor.embedder_id +
                      "' does not match store embedder '" + store.embedder_id +
                      "'");
    if (descriptor.dimension() != store.dimension)
      throw DataError("descriptor dimension " +
                      std::to_string(descriptor.dimension()) +
                      " does not match store dimension " +
                      std::to_string(store.dimension));
    if (descriptor.pooling != store.pooling)
      throw DataError("descriptor pooling does not match store pooling");
  }
  store.categories[label].push_back(descriptor);
}

/// Minimum distance from the query to any stored instance of the category.
inline double object_category_distance(const CategoryStore& store,
                                       const std::string& label,
                                       const ObjectDescriptor& query) {
  const auto it = store.categories.find(label);
  if (it == store.categories.end())
    throw DataError("unknown category '" + label + "'");
  double best = std::numeric_limits<double>::infinity();
  for (const ObjectDescriptor& inst : it->second)
    best = std::min(best,
                    feature_distance(query.feature, inst.feature, store.distance));
  return best;
}

/// Result of a nearest-category query. label is empty (Unknown) exactly when
/// the store holds no categories; ocd_table lists every category's distance.
struct Classification {
  std::optional<std::string> label;
  double ocd = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::string, double>> ocd_table;

  bool unknown() const { return !label.has_value(); }
};

/// Nearest category by OCD; ties go to the lexicographically smallest label
/// (map order plus strict comparison).
inline Classification classify(const CategoryStore& store,
                               const ObjectDescriptor& query) {
  Classification result;
  if (store.empty()) return result;
  result.ocd_table.reserve(store.category_count());
  for (const auto& [label, instances] : store.categories) {
    const double d = object_category_distance(store, label, query);
    result.ocd_table.emplace_back(label, d);
    if (d < result.ocd) {
      result.ocd = d;
      result.label = label;
    }
  }
  return result;
}

/// Store file: text header, then one binary record per instance keyed by
/// its label (same record layout as external embeddings). Values pass
/// through float32, so a save/load round-trip quantizes features.
inline std::string save_store(const CategoryStore& store) {
  std::string out = "orthonet-store 1\n";
  out += "embedder " + store.embedder_id + "\n";
  out += "dim " + std::to_string(store.dimension) + "\n";
  out += "distance " + std::string(distance_name(store.distance)) + "\n";
  out += "pooling " + std::string(pooling_name(store.pooling)) + "\n";
  out += "instances " + std::to_string(store.instance_count()) + "\n";

  const auto put_u32 = [&](std::uint32_t w) {
    out.push_back(static_cast<char>(w & 0xFF));
    out.push_back(static_cast<char>((w >> 8) & 0xFF));
    out.push_back(static_cast<char>((w >> 16) & 0xFF));
    out.push_back(static_cast<char>((w >> 24) & 0xFF));
  };
  for (const auto& [label, instances] : store.categories) {
    for (const ObjectDescriptor& inst : instances) {
      put_u32(static_cast<std::uint32_t>(label.size()));
      out += label;
      put_u32(static_cast<std::uint32_t>(inst.feature.size()));
      for (double v : inst.feature) {
        float f = static_cast<float>(v);
        std::uint32_t w;
        std::memcpy(&w, &f, 4);
        put_u32(w);
      }
    }
  }
  return out;
}

inline PoolingMode parse_pooling(std::string_view name) {
  if (name == "max") return PoolingMode::max;
  if (name == "avg") return PoolingMode::avg;
  throw DataError("unknown pooling mode '" + std::string(name) + "'");
}

inline CategoryStore load_store(std::string_view bytes) {
  CategoryStore store;
  std::size_t pos = 0;
  const auto read_line = [&]() -> std::string_view {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos)
      throw ParseError("truncated store header");
    std::string_view line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  const auto expect_field = [&](std::string_view key) -> std::string {
    const std::string_view line = read_line();
    if (line.substr(0, key.size()) != key || line.size() <= key.size() ||
        line[key.size()] != ' ')
      throw ParseError("store header missing '" + std::string(key) + "' field");
    return std::string(line.substr(key.size() + 1));
  };

  const auto parse_size = [](const std::string& text, const char* what) {
    if (text.empty() || text.size() > 9)
      throw ParseError(std::string("malformed ") + what);
    std::size_t value = 0;
    for (char c : text) {
      if (c < '0' || c > '9')
        throw ParseError(std::string("malformed ") + what);
      value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    return value;
  };

  if (read_line() != "orthonet-store 1")
    throw ParseError("not a category store file");
  store.embedder_id = expect_field("embedder");
  store.dimension = parse_size(expect_field("dim"), "store dimension");
  store.distance = parse_distance(expect_field("distance"));
  store.pooling = parse_pooling(expect_field("pooling"));
  const std::size_t count =
      parse_size(expect_field("instances"), "instance count");

  const auto read_u32 = [&]() -> std::uint32_t {
    if (pos + 4 > bytes.size()) throw ParseError("truncated store record");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    pos += 4;
    return static_cast<std::uint32_t>(p[0]) |
           (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
  };
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t klen = read_u32();
    if (klen == 0 || pos + klen > bytes.size())
      throw ParseError("truncated store record label");
    std::string label(bytes.substr(pos, klen));
    pos += klen;
    const std::uint32_t dim = read_u32();
    if (dim != store.dimension)
      throw ParseError("record dimension " + std::to_string(dim) +
                       " does not match store dimension " +
                       std::to_string(store.dimension));
    ObjectDescriptor d;
    d.pooling = store.pooling;
    d.embedder_id = store.embedder_id;
    d.feature.reserve(std::min<std::size_t>(dim, 1u << 20));
    for (std::uint32_t k = 0; k < dim; ++k) {
      const std::uint32_t w = read_u32();
      float f;
      std::memcpy(&f, &w, 4);
      d.feature.push_back(static_cast<double>(f));
    }
    teach(store, label, d);
  }
  if (pos != bytes.size())
    throw ParseError("trailing bytes after last store record");
  return store;
}

}  // namespace orthonet

#endif  // ORTHONET_LEARNER_HPP
