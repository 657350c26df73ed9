#ifndef ORTHONET_EMBEDDING_HPP
#define ORTHONET_EMBEDDING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "orthonet/frame.hpp"
#include "orthonet/projection.hpp"
#include "orthonet/types.hpp"

namespace orthonet {

using FeatureVector = std::vector<double>;

enum class PoolingMode { max, avg };

inline const char* pooling_name(PoolingMode m) {
  return m == PoolingMode::max ? "max" : "avg";
}

/// Pose/scale-invariant global descriptor. Descriptors are comparable only
/// when embedder ids and pooling modes agree; the store enforces this.
struct ObjectDescriptor {
  FeatureVector feature;
  PoolingMode pooling = PoolingMode::avg;
  std::string embedder_id;

  std::size_t dimension() const { return feature.size(); }
};

/// Per-view feature extractor. Implementations must be pure: the same image
/// always yields the same vector, and entries are finite and non-negative.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual FeatureVector embed(const ProjectionImage& image) const = 0;
};

/// Block-sum pooling of the bin grid: pool_side x pool_side blocks of side
/// ceil(R / pool_side), edge blocks smaller. Flattened row-major, D =
/// pool_side^2. Preserves total mass, so unit-sum images give unit-sum
/// features.
inline FeatureVector embed_raw(const ProjectionImage& image,
                               std::uint32_t pool_side) {
  const std::uint32_t R = image.resolution;
  if (pool_side < 1 || pool_side > R)
    throw DataError("pool_side must be in [1, resolution]");

  const std::uint32_t block = (R + pool_side - 1) / pool_side;
  FeatureVector out(static_cast<std::size_t>(pool_side) * pool_side, 0.0);
  for (std::uint32_t i = 0; i < R; ++i) {
    const std::uint32_t bi = std::min(i / block, pool_side - 1);
    for (std::uint32_t j = 0; j < R; ++j) {
      const std::uint32_t bj = std::min(j / block, pool_side - 1);
      out[static_cast<std::size_t>(bi) * pool_side + bj] +=
          image.bins[static_cast<std::size_t>(i) * R + j];
    }
  }
  return out;
}

class RawBlockEmbedder final : public Embedder {
 public:
  explicit RawBlockEmbedder(std::uint32_t pool_side = 15)
      : pool_side_(pool_side) {
    if (pool_side_ < 1) throw DataError("pool_side must be positive");
  }

  std::string id() const override {
    return "raw:p" + std::to_string(pool_side_);
  }
  std::size_t dimension() const override {
    return static_cast<std::size_t>(pool_side_) * pool_side_;
  }
  FeatureVector embed(const ProjectionImage& image) const override {
    return embed_raw(image, pool_side_);
  }

  std::uint32_t pool_side() const { return pool_side_; }

 private:
  std::uint32_t pool_side_;
};

/// Element-wise max or mean of the three per-view features.
inline FeatureVector pool(const FeatureVector& front, const FeatureVector& top,
                          const FeatureVector& side, PoolingMode mode) {
  if (front.size() != top.size() || front.size() != side.size())
    throw DataError("pooling inputs have mismatched dimensions");
  FeatureVector out(front.size());
  if (mode == PoolingMode::max) {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = std::max({front[i], top[i], side[i]});
  } else {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = (front[i] + top[i] + side[i]) / 3.0;
  }
  return out;
}

struct DescribeConfig {
  std::uint32_t resolution = 150;
  PoolingMode pooling = PoolingMode::avg;
  BinMode bin_mode = BinMode::density;
  DegeneracyPolicy degeneracy = DegeneracyPolicy::fail;
  double degeneracy_tol = 1e-6;
};

/// Everything the pipeline produced for one object; images are kept so
/// callers can emit them (PGM / float records) without recomputation.
struct DescribeResult {
  ObjectDescriptor descriptor;
  ReferenceFrame frame;
  SignResolution sign;
  ProjectionImage front;
  ProjectionImage top;
  ProjectionImage side;
};

/// Full descriptor pipeline: reference frame, transform, bounding box,
/// projection, sign disambiguation, rasterization, per-view embedding,
/// pooling. Pure given (cloud, config, embedder).
inline DescribeResult describe_object(const PointCloud& cloud,
                                      const DescribeConfig& config,
                                      const Embedder& embedder) {
  DescribeResult result;
  result.frame = build_reference_frame(cloud, config.degeneracy,
                                       config.degeneracy_tol);
  const PointCloud local = transform_to_frame(cloud, result.frame);
  const double l = aabb_side(local);
  ViewSet views = project_views(local, l);
  result.sign = disambiguate_sign(views);

  result.front = rasterize(views.front, config.resolution, config.bin_mode);
  result.top = rasterize(views.top, config.resolution, config.bin_mode);
  result.side = rasterize(views.side, config.resolution, config.bin_mode);

  result.descriptor.feature =
      pool(embedder.embed(result.front), embedder.embed(result.top),
           embedder.embed(result.side), config.pooling);
  result.descriptor.pooling = config.pooling;
  result.descriptor.embedder_id = embedder.id();
  return result;
}

inline DescribeResult describe_object(const PointCloud& cloud,
                                      const DescribeConfig& config = {},
                                      std::uint32_t pool_side = 15) {
  return describe_object(cloud, config, RawBlockEmbedder(pool_side));
}

/// Externally computed per-view features (e.g. CNN activations), keyed by
/// "objectid/front|top|side". All records share one dimension.
struct ExternalEmbeddings {
  std::size_t dimension = 0;
  std::map<std::string, FeatureVector> by_key;
};

namespace detail {

inline void check_external_value(double v, const std::string& key) {
  if (!std::isfinite(v))
    throw DataError("non-finite feature value in record '" + key + "'");
  if (v < 0.0)
    throw DataError("negative feature value in record '" + key + "'");
}

inline void add_external_record(ExternalEmbeddings& out, std::string key,
                                FeatureVector vec) {
  if (vec.empty()) throw DataError("empty feature vector in record '" + key + "'");
  if (out.by_key.empty())
    out.dimension = vec.size();
  else if (vec.size() != out.dimension)
    throw DataError("dimension mismatch in record '" + key + "': got " +
                    std::to_string(vec.size()) + ", expected " +
                    std::to_string(out.dimension));
  if (!out.by_key.emplace(std::move(key), std::move(vec)).second)
    throw DataError("duplicate record key '" + key + "'");
}

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

/// Text variant: one record per line, `key<TAB>D<TAB>v1 v2 ... vD`.
inline ExternalEmbeddings parse_external_embeddings_text(std::string_view bytes);

/// Binary variant: repeated [u32 key length][key][u32 D][D x float32], all
/// little-endian.
inline ExternalEmbeddings parse_external_embeddings_binary(std::string_view bytes);

}  // namespace orthonet

#include <charconv>

#include "orthonet/io.hpp"

namespace orthonet {

inline ExternalEmbeddings parse_external_embeddings_text(
    std::string_view bytes) {
  ExternalEmbeddings out;
  detail::LineScanner scan(bytes);
  std::string_view line;
  std::vector<std::string_view> tok;
  while (scan.next_data(line)) {
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string_view::npos
                               ? std::string_view::npos
                               : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos)
      throw ParseError("expected key<TAB>dim<TAB>values", scan.line_no());
    std::string key(line.substr(0, t1));
    const std::uint64_t dim =
        detail::parse_count(line.substr(t1 + 1, t2 - t1 - 1), scan.line_no());
    detail::split_tokens(line.substr(t2 + 1), false, tok);
    if (tok.size() != dim)
      throw ParseError("record '" + key + "' declares " + std::to_string(dim) +
                           " values but has " + std::to_string(tok.size()),
                       scan.line_no());
    FeatureVector vec;
    vec.reserve(tok.size());
    for (std::string_view t : tok) {
      const double v = detail::parse_double(t, scan.line_no());
      detail::check_external_value(v, key);
      vec.push_back(v);
    }
    detail::add_external_record(out, std::move(key), std::move(vec));
  }
  return out;
}

inline ExternalEmbeddings parse_external_embeddings_binary(
    std::string_view bytes) {
  ExternalEmbeddings out;
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  std::size_t pos = 0;
  const std::size_t n = bytes.size();
  while (pos < n) {
    if (pos + 4 > n) throw ParseError("truncated record header");
    const std::uint32_t klen = detail::read_u32le(p + pos);
    pos += 4;
    if (klen == 0 || pos + klen > n)
      throw ParseError("truncated or empty record key");
    std::string key(bytes.substr(pos, klen));
    pos += klen;
    if (pos + 4 > n) throw ParseError("truncated dimension in record '" + key + "'");
    const std::uint32_t dim = detail::read_u32le(p + pos);
    pos += 4;
    if (dim == 0 || pos + 4ull * dim > n)
      throw ParseError("truncated values in record '" + key + "'");
    FeatureVector vec;
    vec.reserve(dim);
    for (std::uint32_t i = 0; i < dim; ++i) {
      const std::uint32_t w = detail::read_u32le(p + pos);
      pos += 4;
      float f;
      static_assert(sizeof(f) == 4);
      std::memcpy(&f, &w, 4);
      const double v = static_cast<double>(f);
      detail::check_external_value(v, key);
      vec.push_back(v);
    }
    detail::add_external_record(out, std::move(key), std::move(vec));
  }
  return out;
}

/// Sniffs text vs binary by a NUL byte in the first 512 bytes.
inline ExternalEmbeddings parse_external_embeddings(std::string_view bytes) {
  const std::size_t probe = std::min<std::size_t>(bytes.size(), 512);
  const bool binary = bytes.substr(0, probe).find('\0') != std::string_view::npos;
  return binary ? parse_external_embeddings_binary(bytes)
                : parse_external_embeddings_text(bytes);
}

/// Assemble a descriptor for one object id from externally computed per-view
/// features. Missing view keys are an error naming the key.
inline ObjectDescriptor descriptor_from_external(const ExternalEmbeddings& ext,
                                                 const std::string& object_id,
                                                 PoolingMode pooling) {
  const auto lookup = [&](const char* view) -> const FeatureVector& {
    const auto it = ext.by_key.find(object_id + "/" + view);
    if (it == ext.by_key.end())
      throw DataError("missing external embedding for '" + object_id + "/" +
                      view + "'");
    return it->second;
  };
  ObjectDescriptor d;
  const FeatureVector& front = lookup("front");  // fixed lookup order keeps
  const FeatureVector& top = lookup("top");      // missing-key errors stable
  const FeatureVector& side = lookup("side");
  d.feature = pool(front, top, side, pooling);
  d.pooling = pooling;
  d.embedder_id = "external:d" + std::to_string(ext.dimension);
  return d;
}

}  // namespace orthonet

#endif  // ORTHONET_EMBEDDING_HPP
