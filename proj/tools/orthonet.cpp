// Command-line front end: descriptor computation, offline evaluation,
// open-ended protocol runs and interactive teaching sessions.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orthonet/orthonet.hpp"

namespace {

using namespace orthonet;

// Flag values kept as optionals so explicit flags override config files,
// which override defaults.
struct Flags {
  std::optional<std::uint32_t> resolution;
  std::optional<std::string> pooling;
  std::optional<std::string> distance;
  std::optional<std::string> embedder;
  std::optional<std::uint32_t> pool_side;
  std::optional<double> tau;
  std::optional<std::size_t> breakpoint;
  std::optional<std::size_t> window_multiplier;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::string> raster;
  std::optional<std::string> order;
  std::string config_path;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path,
                  "key=value config file (overrides ORTHONET_CONFIG)");
  cmd->add_option("--resolution", f.resolution, "raster grid side, 25..225");
  cmd->add_option("--pooling", f.pooling, "view pooling: max or avg");
  cmd->add_option("--distance", f.distance, "descriptor distance: chi2 or js");
  cmd->add_option("--embedder", f.embedder,
                  "per-view embedder: raw or external:<path>");
  cmd->add_option("--pool-side", f.pool_side,
                  "raw embedder block grid side (D = side^2)");
  cmd->add_option("--tau", f.tau, "protocol accuracy threshold in (0,1)");
  cmd->add_option("--breakpoint", f.breakpoint,
                  "asks without introduction before giving up");
  cmd->add_option("--window-multiplier", f.window_multiplier,
                  "accuracy window = max(multiplier * known, 10)");
  cmd->add_option("--seed", f.seed, "experiment seed");
  cmd->add_option("--samples", f.samples, "points sampled per mesh");
  cmd->add_option("--raster", f.raster, "bin mode: density or occupancy");
  cmd->add_option("--order", f.order,
                  "category introduction order: dataset or shuffled");
}

Config resolve_config(const Flags& f) {
  Config config;
  if (const char* env = std::getenv("ORTHONET_CONFIG"); env && *env)
    apply_config_text(config, read_file(env));
  if (!f.config_path.empty())
    apply_config_text(config, read_file(f.config_path));

  if (f.resolution) config.resolution = *f.resolution;
  if (f.pooling) config.pooling = parse_pooling(*f.pooling);
  if (f.distance) config.distance = parse_distance(*f.distance);
  if (f.embedder) config.embedder = *f.embedder;
  if (f.pool_side) config.pool_side = *f.pool_side;
  if (f.tau) config.tau = *f.tau;
  if (f.breakpoint) config.breakpoint = *f.breakpoint;
  if (f.window_multiplier) config.window_multiplier = *f.window_multiplier;
  if (f.seed) config.seed = *f.seed;
  if (f.samples) config.sample_count = *f.samples;
  if (f.raster) config.bin_mode = parse_bin_mode(*f.raster);
  if (f.order) config.shuffle_categories = parse_category_order(*f.order);

  validate_config(config);
  return config;
}

std::optional<ExternalEmbeddings> load_external_if_configured(
    const Config& config) {
  if (config.embedder.rfind("external:", 0) != 0) return std::nullopt;
  const std::string path = config.embedder.substr(9);
  if (path.empty()) throw DataError("external embedder needs a path");
  return parse_external_embeddings(read_file(path));
}

std::string config_header(const char* command, const Config& config) {
  return "# orthonet " + std::string(command) + "\n" + serialize_config(config);
}

ProtocolConfig protocol_config(const Config& config) {
  ProtocolConfig pc;
  pc.tau = config.tau;
  pc.breakpoint = config.breakpoint;
  pc.window_multiplier = config.window_multiplier;
  pc.shuffle_categories = config.shuffle_categories;
  pc.distance = config.distance;
  return pc;
}

// ---- describe ----

struct DescribeArgs {
  std::string input;
  std::string out;
  std::string emit_pgm;
  std::string emit_raw;
  bool emit_pose = false;
};

int cmd_describe(const DescribeArgs& args, const Flags& flags) {
  const Config config = resolve_config(flags);
  const fs::path input(args.input);
  const std::string stem = input.stem().string();
  const std::string id = stem;

  std::string out = config_header("describe", config);
  ObjectDescriptor descriptor;

  const auto external = load_external_if_configured(config);
  if (external) {
    descriptor = descriptor_from_external(*external, id, config.pooling);
    if (args.emit_pose || !args.emit_pgm.empty() || !args.emit_raw.empty())
      throw DataError(
          "pose/view emission needs the raw pipeline, not external features");
  } else {
    const PointCloud cloud =
        load_cloud_file(input, config.sample_count, config.seed, id);
    DescribeConfig dc;
    dc.resolution = config.resolution;
    dc.pooling = config.pooling;
    dc.bin_mode = config.bin_mode;
    const DescribeResult result =
        describe_object(cloud, dc, RawBlockEmbedder(config.pool_side));
    descriptor = result.descriptor;

    if (args.emit_pose)
      out += "pose " + format_pose(result.frame) + "\n";
    out += "r_x " + detail::format_real(result.sign.r_x) + "\n";
    out += "r_y " + detail::format_real(result.sign.r_y) + "\n";
    out += "mirrored " + std::string(result.sign.mirrored ? "1" : "0") + "\n";

    const auto emit_views = [&](const fs::path& dir, bool pgm) {
      fs::create_directories(dir);
      for (const ProjectionImage* img :
           {&result.front, &result.top, &result.side}) {
        const std::string name =
            stem + "_" + view_plane_name(img->plane) + (pgm ? ".pgm" : ".f32");
        write_file(dir / name, pgm ? to_pgm(*img) : to_float_record(*img));
      }
    };
    if (!args.emit_pgm.empty()) emit_views(args.emit_pgm, true);
    if (!args.emit_raw.empty()) emit_views(args.emit_raw, false);
  }

  out += "id " + id + "\n";
  out += "dim " + std::to_string(descriptor.dimension()) + "\n";
  out += "feature";
  for (double v : descriptor.feature) out += " " + detail::format_real(v);
  out += "\n";

  if (args.out.empty())
    std::fputs(out.c_str(), stdout);
  else
    write_file(args.out, out);
  return 0;
}

// ---- eval-offline ----

struct OfflineArgs {
  std::string train_dir;
  std::string test_dir;
  std::string dataset_dir;
  std::string out;
};

int cmd_eval_offline(const OfflineArgs& args, const Flags& flags) {
  const Config config = resolve_config(flags);
  const auto external = load_external_if_configured(config);
  const ExternalEmbeddings* ext = external ? &*external : nullptr;

  LabeledDataset train, test;
  if (!args.dataset_dir.empty()) {
    const fs::path root(args.dataset_dir);
    const DatasetScan scan = scan_dataset(root);
    train = build_descriptors(apply_split(scan, root, "train"), config, ext);
    test = build_descriptors(apply_split(scan, root, "test"), config, ext);
  } else {
    if (args.train_dir.empty() || args.test_dir.empty())
      throw DataError("need --train and --test directories, or --dataset");
    train = build_descriptors(scan_dataset(args.train_dir), config, ext);
    test = build_descriptors(scan_dataset(args.test_dir), config, ext);
  }

  const OfflineReport report = offline_eval(train, test, config.distance);

  std::string out = config_header("eval-offline", config);
  out += "train_instances " + std::to_string([&] {
    std::size_t n = 0;
    for (const auto& [label, items] : train) n += items.size();
    return n;
  }()) + "\n";
  out += "test_instances " + std::to_string(report.total) + "\n";
  out += "aia " + detail::format_real(report.aia) + "\n";
  out += "aca " + detail::format_real(report.aca) + "\n";
  out += "labels";
  for (const std::string& label : report.labels) out += " " + label;
  out += "\n";
  for (std::size_t i = 0; i < report.labels.size(); ++i) {
    out += "confusion " + report.labels[i];
    for (std::size_t j = 0; j < report.labels.size(); ++j)
      out += " " + detail::format_real(report.confusion[i][j]);
    out += "\n";
  }

  if (args.out.empty())
    std::fputs(out.c_str(), stdout);
  else
    write_file(args.out, out);
  return 0;
}

// ---- eval-openended ----

struct OpenEndedArgs {
  std::string dataset_dir;
  std::string seeds;
  std::string log_dir;
  std::string out;
};

int cmd_eval_openended(const OpenEndedArgs& args, const Flags& flags) {
  const Config config = resolve_config(flags);
  const auto external = load_external_if_configured(config);
  const ExternalEmbeddings* ext = external ? &*external : nullptr;

  const LabeledDataset data =
      build_descriptors(scan_dataset(args.dataset_dir), config, ext);

  std::vector<std::uint64_t> seeds;
  if (args.seeds.empty()) {
    seeds.push_back(config.seed);
  } else {
    std::string_view rest(args.seeds);
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string_view tok = rest.substr(0, comma);
      seeds.push_back(detail::parse_count(tok, 0));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (seeds.empty()) throw DataError("empty --seeds list");
  }

  const ProtocolConfig pc = protocol_config(config);
  std::string out = config_header("eval-openended", config);
  out += "# seed\tqci\ttlc\taic\tgca\tapa\tstop\n";

  double sq = 0, st = 0, sa = 0, sg = 0, sp = 0;
  for (const std::uint64_t seed : seeds) {
    const ProtocolResult result = run_simulated_teacher(data, pc, seed);
    const Metrics m = compute_metrics(result.log, result.store);
    out += std::to_string(seed) + "\t" + std::to_string(m.qci) + "\t" +
           std::to_string(m.tlc) + "\t" + detail::format_real(m.aic) + "\t" +
           detail::format_real(m.gca) + "\t" + detail::format_real(m.apa) +
           "\t" + stop_condition_name(result.log.stop) + "\n";
    sq += static_cast<double>(m.qci);
    st += static_cast<double>(m.tlc);
    sa += m.aic;
    sg += m.gca;
    sp += m.apa;
    if (!args.log_dir.empty()) {
      fs::create_directories(args.log_dir);
      write_file(fs::path(args.log_dir) /
                     ("openended_seed" + std::to_string(seed) + ".log"),
                 serialize_log(result.log));
    }
  }
  const double n = static_cast<double>(seeds.size());
  out += "mean\t" + detail::format_real(sq / n) + "\t" +
         detail::format_real(st / n) + "\t" + detail::format_real(sa / n) +
         "\t" + detail::format_real(sg / n) + "\t" +
         detail::format_real(sp / n) + "\t-\n";

  if (args.out.empty())
    std::fputs(out.c_str(), stdout);
  else
    write_file(args.out, out);
  return 0;
}

// ---- teach (interactive) ----

struct TeachArgs {
  std::vector<std::string> files;
  std::string store_path;
};

int cmd_teach(const TeachArgs& args, const Flags& flags) {
  const Config config = resolve_config(flags);
  if (load_external_if_configured(config))
    throw DataError("interactive teaching uses the raw pipeline only");

  CategoryStore store;
  store.distance = config.distance;
  if (!args.store_path.empty() && fs::exists(args.store_path))
    store = load_store(read_file(args.store_path));

  DescribeConfig dc;
  dc.resolution = config.resolution;
  dc.pooling = config.pooling;
  dc.bin_mode = config.bin_mode;
  dc.degeneracy = DegeneracyPolicy::tie_break;
  const RawBlockEmbedder raw(config.pool_side);

  for (const std::string& file : args.files) {
    const std::string id = fs::path(file).stem().string();
    const PointCloud cloud =
        load_cloud_file(file, config.sample_count, config.seed, id);
    const ObjectDescriptor d = describe_object(cloud, dc, raw).descriptor;

    const Classification c = classify(store, d);
    std::printf("object %s predicted %s ocd %s\n", file.c_str(),
                c.label ? c.label->c_str() : "Unknown",
                c.unknown() ? "-" : detail::format_real(c.ocd).c_str());

    bool resolved = false;
    while (!resolved) {
      std::printf("> ");
      std::fflush(stdout);
      std::string line;
      if (!std::getline(std::cin, line)) {
        resolved = true;  // EOF: stop consuming commands, keep session result
        break;
      }
      detail::LineScanner one(line);
      std::string_view l;
      std::vector<std::string_view> tok;
      if (one.next(l)) detail::split_tokens(l, false, tok);
      if (tok.empty()) continue;
      if (tok[0] == "skip") {
        resolved = true;
      } else if (tok[0] == "quit") {
        goto done;
      } else if ((tok[0] == "teach" || tok[0] == "correct") && tok.size() == 2) {
        teach(store, std::string(tok[1]), d);
        std::printf("stored %s (%zu instances, %zu categories)\n",
                    std::string(tok[1]).c_str(), store.instance_count(),
                    store.category_count());
        resolved = true;
      } else {
        std::printf("commands: teach <label> | correct <label> | skip | quit\n");
      }
    }
  }
done:
  if (!args.store_path.empty()) {
    write_file(args.store_path, save_store(store));
    std::printf("store saved to %s (%zu categories, %zu instances)\n",
                args.store_path.c_str(), store.category_count(),
                store.instance_count());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "orthographic-projection object descriptors and open-ended recognition"};
  app.require_subcommand(1);

  Flags flags;

  DescribeArgs describe_args;
  CLI::App* describe =
      app.add_subcommand("describe", "compute a descriptor for one object");
  describe->add_option("input", describe_args.input, "OFF/PLY/XYZ file")
      ->required();
  describe->add_option("--out", describe_args.out, "write record here");
  describe->add_flag("--emit-pose", describe_args.emit_pose,
                     "include the 12-number reference frame");
  describe->add_option("--emit-pgm", describe_args.emit_pgm,
                       "write per-view PGM images into this directory");
  describe->add_option("--emit-raw", describe_args.emit_raw,
                       "write per-view float32 records into this directory");
  add_common_flags(describe, flags);

  OfflineArgs offline_args;
  CLI::App* offline = app.add_subcommand(
      "eval-offline", "train/test evaluation with AIA/ACA and confusion");
  offline->add_option("--train", offline_args.train_dir, "training dataset root");
  offline->add_option("--test", offline_args.test_dir, "testing dataset root");
  offline->add_option("--dataset", offline_args.dataset_dir,
                      "single root with splits/train.txt and splits/test.txt");
  offline->add_option("--out", offline_args.out, "write report here");
  add_common_flags(offline, flags);

  OpenEndedArgs open_args;
  CLI::App* open = app.add_subcommand(
      "eval-openended", "simulated-teacher open-ended protocol");
  open->add_option("--dataset", open_args.dataset_dir, "dataset root")
      ->required();
  open->add_option("--seeds", open_args.seeds, "comma-separated seed list");
  open->add_option("--log-dir", open_args.log_dir, "write per-seed logs here");
  open->add_option("--out", open_args.out, "write report here");
  add_common_flags(open, flags);

  TeachArgs teach_args;
  CLI::App* teach_cmd =
      app.add_subcommand("teach", "interactive teach/correct session");
  teach_cmd->add_option("files", teach_args.files, "object files to present")
      ->required();
  teach_cmd->add_option("--store", teach_args.store_path,
                        "category store file (loaded if present, saved on exit)");
  add_common_flags(teach_cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*describe) return cmd_describe(describe_args, flags);
    if (*offline) return cmd_eval_offline(offline_args, flags);
    if (*open) return cmd_eval_openended(open_args, flags);
    if (*teach_cmd) return cmd_teach(teach_args, flags);
  } catch (const DegenerateFrameError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 2;
}
