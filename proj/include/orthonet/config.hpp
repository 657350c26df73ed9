#ifndef ORTHONET_CONFIG_HPP
#define ORTHONET_CONFIG_HPP

#include <string>
#include <string_view>

#include "orthonet/embedding.hpp"
#include "orthonet/io.hpp"
#include "orthonet/learner.hpp"
#include "orthonet/types.hpp"

namespace orthonet {

/// Pipeline and protocol settings shared by every CLI command. Defaults are
/// the recommended operating point; validate() enforces the documented
/// ranges.
struct Config {
  std::uint32_t resolution = 150;      // raster grid side, 25..225
  PoolingMode pooling = PoolingMode::avg;
  DistanceKind distance = DistanceKind::chi2;
  std::string embedder = "raw";        // "raw" or "external:<path>"
  std::uint32_t pool_side = 15;        // raw embedder block grid, D = side^2
  double tau = 0.67;                   // protocol accuracy threshold
  std::size_t breakpoint = 100;        // asks since last introduction
  std::size_t window_multiplier = 3;
  std::uint64_t seed = 0;
  std::size_t sample_count = 10000;    // points sampled per mesh
  BinMode bin_mode = BinMode::density;
  bool shuffle_categories = false;
};

inline const char* bin_mode_name(BinMode m) {
  return m == BinMode::density ? "density" : "occupancy";
}

inline BinMode parse_bin_mode(std::string_view name) {
  if (name == "density") return BinMode::density;
  if (name == "occupancy") return BinMode::occupancy;
  throw DataError("unknown raster mode '" + std::string(name) + "'");
}

inline bool parse_category_order(std::string_view name) {
  if (name == "dataset") return false;
  if (name == "shuffled") return true;
  throw DataError("unknown category order '" + std::string(name) + "'");
}

namespace detail {

inline std::uint64_t config_uint(std::string_view value, std::size_t line) {
  return parse_count(value, line);
}

inline double config_real(std::string_view value, std::size_t line) {
  return parse_double(value, line);
}

}  // namespace detail

/// Apply one key=value setting. Unknown keys are rejected so typos cannot
/// silently fall back to defaults.
inline void apply_config_entry(Config& config, std::string_view key,
                               std::string_view value, std::size_t line = 0) {
  if (key == "resolution")
    config.resolution =
        static_cast<std::uint32_t>(detail::config_uint(value, line));
  else if (key == "pooling")
    config.pooling = parse_pooling(value);
  else if (key == "distance")
    config.distance = parse_distance(value);
  else if (key == "embedder")
    config.embedder = std::string(value);
  else if (key == "pool_side")
    config.pool_side =
        static_cast<std::uint32_t>(detail::config_uint(value, line));
  else if (key == "tau")
    config.tau = detail::config_real(value, line);
  else if (key == "breakpoint")
    config.breakpoint = static_cast<std::size_t>(detail::config_uint(value, line));
  else if (key == "window_multiplier")
    config.window_multiplier =
        static_cast<std::size_t>(detail::config_uint(value, line));
  else if (key == "seed")
    config.seed = detail::config_uint(value, line);
  else if (key == "sample_count")
    config.sample_count =
        static_cast<std::size_t>(detail::config_uint(value, line));
  else if (key == "raster")
    config.bin_mode = parse_bin_mode(value);
  else if (key == "category_order")
    config.shuffle_categories = parse_category_order(value);
  else
    throw ParseError("unknown config key '" + std::string(key) + "'", line);
}

/// Flat key=value file; '#' comments and blank lines allowed.
inline void apply_config_text(Config& config, std::string_view bytes) {
  detail::LineScanner scan(bytes);
  std::string_view line;
  while (scan.next_data(line)) {
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected key=value", scan.line_no());
    std::string_view key = line.substr(0, eq);
    std::string_view value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
      key.remove_suffix(1);
    while (!value.empty() && (value.front() == ' ' || value.front() == '\t'))
      value.remove_prefix(1);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t'))
      value.remove_suffix(1);
    apply_config_entry(config, key, value, scan.line_no());
  }
}

inline void validate_config(const Config& config) {
  if (config.resolution < 25 || config.resolution > 225)
    throw DataError("resolution must lie in [25, 225]");
  if (config.pool_side < 1 || config.pool_side > config.resolution)
    throw DataError("pool_side must lie in [1, resolution]");
  if (!(config.tau > 0.0 && config.tau < 1.0))
    throw DataError("tau must lie in (0, 1)");
  if (config.breakpoint < 1) throw DataError("breakpoint must be at least 1");
  if (config.window_multiplier < 1)
    throw DataError("window_multiplier must be at least 1");
  if (config.sample_count < 1)
    throw DataError("sample_count must be at least 1");
  if (config.embedder != "raw" && config.embedder.rfind("external:", 0) != 0)
    throw DataError("embedder must be 'raw' or 'external:<path>'");
}

/// Stable key=value dump used as the header of every emitted report.
inline std::string serialize_config(const Config& config) {
  std::string out;
  out += "resolution=" + std::to_string(config.resolution) + "\n";
  out += "pooling=" + std::string(pooling_name(config.pooling)) + "\n";
  out += "distance=" + std::string(distance_name(config.distance)) + "\n";
  out += "embedder=" + config.embedder + "\n";
  out += "pool_side=" + std::to_string(config.pool_side) + "\n";
  out += "tau=" + detail::format_real(config.tau) + "\n";
  out += "breakpoint=" + std::to_string(config.breakpoint) + "\n";
  out += "window_multiplier=" + std::to_string(config.window_multiplier) + "\n";
  out += "seed=" + std::to_string(config.seed) + "\n";
  out += "sample_count=" + std::to_string(config.sample_count) + "\n";
  out += "raster=" + std::string(bin_mode_name(config.bin_mode)) + "\n";
  out += "category_order=" +
         std::string(config.shuffle_categories ? "shuffled" : "dataset") + "\n";
  return out;
}

}  // namespace orthonet

#endif  // ORTHONET_CONFIG_HPP
