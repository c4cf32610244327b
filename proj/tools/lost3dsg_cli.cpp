// Scenario replay, LSF ablation and memory comparison from the command line.
//
//   lost3dsg replay --scenario data/scenarios/level1_easy.json --out report.json
//   lost3dsg ablate --scenario data/scenarios --out ablation.json
//   lost3dsg memory --scenario data/scenarios/level2_medium.json --voxels 626140
//
// Exit status: 0 success, 1 runtime failure, 2 invalid input.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lost3dsg/harness.hpp"
#include "lost3dsg/run_config.hpp"

#ifndef LOST3DSG_DEFAULT_VECTORS
#define LOST3DSG_DEFAULT_VECTORS "data/vectors/fixture_vectors.txt"
#endif

namespace fs = std::filesystem;
using namespace lost3dsg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct CommonOptions {
  std::string scenario;
  std::string config;
  std::string out;
  std::string embedder;
  std::string endpoint;
  std::uint64_t seed = 0;
};

void add_common(CLI::App& cmd, CommonOptions& opts) {
  cmd.add_option("--scenario", opts.scenario, "Scenario file (or directory for ablate)")
      ->required();
  cmd.add_option("--config", opts.config, "Run configuration document");
  cmd.add_option("--out", opts.out, "Output file (stdout when omitted)");
  cmd.add_option("--embedder", opts.embedder, "Sentence embedder")
      ->check(CLI::IsMember({"local", "remote"}));
  cmd.add_option("--endpoint", opts.endpoint, "Remote embedder URL");
  cmd.add_option("--seed", opts.seed, "Seed for randomized fixtures (recorded in outputs)");
}

RunConfig resolve_config(const CommonOptions& opts) {
  RunConfig config = opts.config.empty() ? RunConfig{} : load_run_config(opts.config);
  if (config.word_vectors.empty()) config.word_vectors = LOST3DSG_DEFAULT_VECTORS;
  if (opts.embedder == "local") config.embedder.kind = EmbedderKind::kLocal;
  if (opts.embedder == "remote") config.embedder.kind = EmbedderKind::kRemote;
  if (!opts.endpoint.empty()) config.embedder.endpoint = opts.endpoint;
  return config;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

std::string ratio_text(const Ratio& r) {
  return std::to_string(r.achieved) + "/" + std::to_string(r.expected);
}

int cmd_replay(const CommonOptions& opts) {
  const Scenario scenario = load_scenario(fs::path(opts.scenario));
  const RunConfig config = resolve_config(opts);
  const ProviderSet providers = make_providers(config);
  const ReplayResult result = replay(scenario, config.tracker, providers.view());

  Json frames = Json::array();
  for (const UpdateReport& r : result.frames) frames.push_back(update_report_to_json(r));
  const Json document{{"scenario", scenario.name},
                      {"config", run_config_to_json(config)},
                      {"seed", opts.seed},
                      {"metrics", metrics_to_json(result.metrics)},
                      {"graph", graph_to_json(result.final_scene.graph)},
                      {"frames", std::move(frames)}};
  write_output(opts.out, dump_fixed(document));

  std::cerr << scenario.name << " (tau " << config.tracker.lsf.tau << "): detections "
            << ratio_text(result.metrics.detections) << ", deletions "
            << ratio_text(result.metrics.deletions) << ", updates "
            << ratio_text(result.metrics.updates) << "\n";
  return kExitOk;
}

std::vector<ComponentSet> parse_subsets(const std::string& text) {
  if (text.empty()) return default_ablation_subsets();
  std::vector<ComponentSet> subsets;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(';', start), text.size());
    subsets.push_back(ComponentSet::parse(text.substr(start, end - start)));
    start = end + 1;
  }
  return subsets;
}

int cmd_ablate(const CommonOptions& opts, const std::string& subset_text) {
  const fs::path dir(opts.scenario);
  if (!fs::is_directory(dir)) {
    throw ValidationError("ablate: " + dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("ablate: no scenario files in " + dir.string());

  std::vector<Scenario> scenarios;
  for (const fs::path& file : files) scenarios.push_back(load_scenario(file));

  const auto subsets = parse_subsets(subset_text);
  const RunConfig config = resolve_config(opts);
  const ProviderSet providers = make_providers(config);
  const auto rows = run_ablation(scenarios, subsets, config.tracker, providers.view());

  Json names = Json::array();
  for (const Scenario& s : scenarios) names.push_back(s.name);
  Json document = ablation_to_json(rows);
  document["scenarios"] = std::move(names);
  document["tau"] = config.tracker.lsf.tau;
  document["seed"] = opts.seed;
  const std::string table = ablation_to_text(rows);

  write_output(opts.out, dump_fixed(document));
  if (!opts.out.empty()) {
    fs::path text_path(opts.out);
    text_path.replace_extension(".txt");
    write_output(text_path.string(), table);
  }
  std::cerr << table;
  return kExitOk;
}

int cmd_memory(const CommonOptions& opts, double voxel_res, std::optional<std::uint64_t> voxels,
               std::uint64_t embedding_dim, std::uint64_t bytes_per_float) {
  const Scenario scenario = load_scenario(fs::path(opts.scenario));
  const RunConfig config = resolve_config(opts);
  const ProviderSet providers = make_providers(config);
  const ReplayResult result = replay(scenario, config.tracker, providers.view());

  const auto bounds = scene_bounds(result.peak_scene.graph);
  std::uint64_t voxel_count = 0;
  if (voxels) {
    voxel_count = *voxels;
  } else if (bounds) {
    voxel_count = voxel_count_for(*bounds, voxel_res);
  }

  const MemoryReport peak =
      memory_report(result.peak_scene, voxel_count, embedding_dim, bytes_per_float);
  const MemoryReport final_scene =
      memory_report(result.final_scene, voxel_count, embedding_dim, bytes_per_float);
  Json document{{"scenario", scenario.name},
                {"memory", memory_report_to_json(peak)},
                {"final_scene", memory_report_to_json(final_scene)},
                {"voxel_resolution", voxel_res},
                {"voxel_count_source", voxels ? "override" : "scene_bounds"}};
  document["scene_bounds"] = bounds ? bbox_to_json(*bounds) : Json(nullptr);
  write_output(opts.out, dump_fixed(document));

  std::cerr << scenario.name << ": " << peak.object_count << " objects, " << peak.object_bytes
            << " B vs " << peak.voxel_bytes << " B for " << peak.voxel_count << " voxels";
  if (peak.reduction) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " (%.0fx smaller)", *peak.reduction);
    std::cerr << buf;
  }
  std::cerr << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lightweight open-vocabulary 3D scene graph: replay, ablation, memory"};
  app.require_subcommand(1);

  CommonOptions replay_opts;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a scenario and score it");
  add_common(*replay_cmd, replay_opts);

  CommonOptions ablate_opts;
  std::string subsets;
  auto* ablate_cmd = app.add_subcommand("ablate", "LSF component ablation over a scenario dir");
  add_common(*ablate_cmd, ablate_opts);
  ablate_cmd->add_option("--ablate-subsets", subsets,
                         "Semicolon-separated component subsets, e.g. \"full;d,m,c;l\"");

  CommonOptions memory_opts;
  double voxel_res = 0.025;
  std::optional<std::uint64_t> voxels;
  std::uint64_t embedding_dim = 512;
  std::uint64_t bytes_per_float = 2;
  auto* memory_cmd = app.add_subcommand("memory", "Object-level vs per-voxel memory footprint");
  add_common(*memory_cmd, memory_opts);
  memory_cmd->add_option("--voxel-res", voxel_res, "Voxel side in meters")
      ->check(CLI::PositiveNumber);
  memory_cmd->add_option("--voxels", voxels, "Explicit voxel count (overrides --voxel-res)");
  memory_cmd->add_option("--embedding-dim", embedding_dim, "Per-voxel embedding size");
  memory_cmd->add_option("--bytes-per-float", bytes_per_float, "Bytes per embedding element");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*replay_cmd) return cmd_replay(replay_opts);
    if (*ablate_cmd) return cmd_ablate(ablate_opts, subsets);
    if (*memory_cmd) {
      return cmd_memory(memory_opts, voxel_res, voxels, embedding_dim, bytes_per_float);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
