#ifndef ORTHONET_DATASET_HPP
#define ORTHONET_DATASET_HPP

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "orthonet/config.hpp"
#include "orthonet/embedding.hpp"
#include "orthonet/io.hpp"
#include "orthonet/protocol.hpp"
#include "orthonet/sampling.hpp"

namespace orthonet {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("failed reading '" + path.string() + "'");
  return std::move(buf).str();
}

inline void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

inline bool recognized_cloud_file(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".off" || ext == ".ply" || ext == ".xyz";
}

/// Load a cloud from a single file, dispatching on extension. Meshes are
/// surface-sampled with a stream derived from (seed, object id) so each
/// object gets its own reproducible point set. Parse errors are re-thrown
/// with the file path prepended.
inline PointCloud load_cloud_file(const fs::path& path,
                                  std::size_t sample_count, std::uint64_t seed,
                                  const std::string& object_id) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const std::string bytes = read_file(path);
  try {
    if (ext == ".off") {
      const TriangleMesh mesh = parse_off(bytes);
      const CounterRng rng(seed, fnv1a64(object_id.data(), object_id.size()));
      return sample_mesh(mesh, sample_count, rng);
    }
    if (ext == ".ply") return parse_ply_ascii(bytes);
    if (ext == ".xyz") return parse_xyz(bytes);
  } catch (const UnsupportedFormatError& e) {
    throw UnsupportedFormatError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  throw UnsupportedFormatError("unrecognized file type '" + path.string() + "'");
}

/// On-disk dataset: root/<label>/<object files>. Labels and files come back
/// sorted so "dataset order" is stable across platforms.
struct DatasetScan {
  std::map<std::string, std::vector<fs::path>> files;
};

inline DatasetScan scan_dataset(const fs::path& root) {
  if (!fs::is_directory(root))
    throw DataError("dataset root '" + root.string() + "' is not a directory");
  DatasetScan scan;
  for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::string label = entry.path().filename().string();
    if (label == "splits" || label.empty() || label[0] == '.') continue;
    std::vector<fs::path> files;
    for (const fs::directory_entry& f : fs::directory_iterator(entry.path()))
      if (f.is_regular_file() && recognized_cloud_file(f.path()))
        files.push_back(f.path());
    if (files.empty()) continue;
    std::sort(files.begin(), files.end());
    scan.files.emplace(label, std::move(files));
  }
  if (scan.files.empty())
    throw DataError("no categories under '" + root.string() + "'");
  return scan;
}

inline std::string object_id_for(const std::string& label, const fs::path& file) {
  return label + "/" + file.stem().string();
}

/// splits/<name>.txt lists one `label/filename` per line. Every listed file
/// must exist in the scan.
inline DatasetScan apply_split(const DatasetScan& scan, const fs::path& root,
                               const std::string& name) {
  const fs::path list_path = root / "splits" / (name + ".txt");
  const std::string bytes = read_file(list_path);
  std::set<std::string> wanted;
  detail::LineScanner lines(bytes);
  std::string_view line;
  while (lines.next_data(line)) {
    std::string_view trimmed = line;
    while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t'))
      trimmed.remove_suffix(1);
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t'))
      trimmed.remove_prefix(1);
    if (!trimmed.empty()) wanted.insert(std::string(trimmed));
  }

  DatasetScan out;
  for (const auto& [label, files] : scan.files) {
    std::vector<fs::path> kept;
    for (const fs::path& f : files) {
      const std::string rel = label + "/" + f.filename().string();
      const auto it = wanted.find(rel);
      if (it != wanted.end()) {
        kept.push_back(f);
        wanted.erase(it);
      }
    }
    if (!kept.empty()) out.files.emplace(label, std::move(kept));
  }
  if (!wanted.empty())
    throw DataError("split '" + name + "' lists missing file '" +
                    *wanted.begin() + "'");
  if (out.files.empty())
    throw DataError("split '" + name + "' selects no files");
  return out;
}

/// Compute descriptors for every scanned object. With an external embedding
/// table the clouds are never touched; otherwise each file runs through the
/// full pipeline with the raw embedder. Datasets routinely contain nearly
/// symmetric objects, so frame degeneracies fall back to the deterministic
/// tie-break instead of failing the whole run.
inline LabeledDataset build_descriptors(const DatasetScan& scan,
                                        const Config& config,
                                        const ExternalEmbeddings* external = nullptr) {
  DescribeConfig dc;
  dc.resolution = config.resolution;
  dc.pooling = config.pooling;
  dc.bin_mode = config.bin_mode;
  dc.degeneracy = DegeneracyPolicy::tie_break;
  const RawBlockEmbedder raw(config.pool_side);

  LabeledDataset data;
  for (const auto& [label, files] : scan.files) {
    std::vector<DatasetItem>& items = data[label];
    items.reserve(files.size());
    for (const fs::path& file : files) {
      const std::string id = object_id_for(label, file);
      if (external) {
        items.push_back(
            {id, descriptor_from_external(*external, id, config.pooling)});
      } else {
        const PointCloud cloud =
            load_cloud_file(file, config.sample_count, config.seed, id);
        items.push_back({id, describe_object(cloud, dc, raw).descriptor});
      }
    }
  }
  return data;
}

}  // namespace orthonet

#endif  // ORTHONET_DATASET_HPP
