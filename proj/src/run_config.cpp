#include "lost3dsg/run_config.hpp"

#include <cstdlib>
#include <fstream>

namespace lost3dsg {

namespace {

using namespace json_read;

ComponentSet parse_components(const Json& value, const std::string& path) {
  if (value.is_string()) return ComponentSet::parse(value.get<std::string>());
  if (!value.is_array() || value.empty()) {
    throw ValidationError(path + ": expected \"full\" or a non-empty list of component names");
  }
  std::string joined;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_string()) throw ValidationError(index(path, i) + ": expected a string");
    if (!joined.empty()) joined += ',';
    joined += value[i].get<std::string>();
  }
  try {
    return ComponentSet::parse(joined);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_run_config(const Json& document, const std::filesystem::path& base_dir) {
  const std::string root = "config";
  object(document, root);
  only_keys(document,
            {"weights", "components", "tau", "epsilon", "near", "far", "exploration",
             "uncertain_recovery", "embedder", "word_vectors"},
            root);

  RunConfig config;
  TrackerConfig& t = config.tracker;

  if (document.contains("weights")) {
    const std::string path = child(root, "weights");
    const Json& w = object(document.at("weights"), path);
    only_keys(w, {"alpha", "beta", "gamma", "delta"}, path);
    t.lsf.weights.alpha = number(w, "alpha", path);
    t.lsf.weights.beta = number(w, "beta", path);
    t.lsf.weights.gamma = number(w, "gamma", path);
    t.lsf.weights.delta = number(w, "delta", path);
  }
  if (document.contains("components")) {
    t.lsf.components = parse_components(document.at("components"), child(root, "components"));
  }
  if (document.contains("tau")) t.lsf.tau = number(document, "tau", root);
  if (document.contains("epsilon")) t.epsilon = number(document, "epsilon", root);
  if (document.contains("near")) t.near = number(document, "near", root);
  if (document.contains("far")) t.far = number(document, "far", root);
  if (document.contains("exploration")) t.exploration = boolean(document, "exploration", root);
  if (document.contains("uncertain_recovery")) {
    t.uncertain_recovery = boolean(document, "uncertain_recovery", root);
  }

  if (document.contains("embedder")) {
    const std::string path = child(root, "embedder");
    const Json& e = object(document.at("embedder"), path);
    only_keys(e, {"kind", "endpoint", "timeout_s", "dimension"}, path);
    if (e.contains("kind")) {
      const std::string kind = string(e, "kind", path);
      if (kind == "local") {
        config.embedder.kind = EmbedderKind::kLocal;
      } else if (kind == "remote") {
        config.embedder.kind = EmbedderKind::kRemote;
      } else {
        throw ValidationError(child(path, "kind") + ": expected \"local\" or \"remote\"");
      }
    }
    if (e.contains("endpoint")) config.embedder.endpoint = string(e, "endpoint", path);
    if (e.contains("timeout_s")) {
      config.embedder.timeout_seconds = number(e, "timeout_s", path);
      if (!(config.embedder.timeout_seconds > 0.0)) {
        throw ValidationError(child(path, "timeout_s") + ": must be positive");
      }
    }
    if (e.contains("dimension")) {
      config.embedder.dimension = count(e.at("dimension"), child(path, "dimension"));
    }
  }

  if (document.contains("word_vectors")) {
    std::filesystem::path p = string(document, "word_vectors", root);
    config.word_vectors = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }

  try {
    t.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(root + ": " + e.what());
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  Json document;
  try {
    document = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": malformed config: " + e.what());
  }
  return parse_run_config(document, path.parent_path());
}

Json run_config_to_json(const RunConfig& config) {
  const TrackerConfig& t = config.tracker;
  const auto w = t.lsf.weights;
  Json components = Json::array();
  for (const Component c : kAllComponents) {
    if (t.lsf.components.contains(c)) components.push_back(std::string(to_string(c)));
  }
  return Json{
      {"weights", {{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}, {"delta", w.delta}}},
      {"components", std::move(components)},
      {"tau", t.lsf.tau},
      {"epsilon", t.epsilon},
      {"near", t.near},
      {"far", t.far},
      {"exploration", t.exploration},
      {"uncertain_recovery", t.uncertain_recovery},
      {"embedder",
       {{"kind", config.embedder.kind == EmbedderKind::kLocal ? "local" : "remote"},
        {"endpoint", config.embedder.endpoint},
        {"timeout_s", config.embedder.timeout_seconds},
        {"dimension", config.embedder.dimension}}},
      {"word_vectors", config.word_vectors.filename().string()}};
}

ProviderSet::ProviderSet(WordVectorTable words, std::unique_ptr<SentenceEmbedder> sentences)
    : words_(std::move(words)), sentences_(std::move(sentences)) {
  if (!sentences_) throw Error("ProviderSet needs a sentence embedder");
}

ProviderSet make_providers(const RunConfig& config) {
  if (config.word_vectors.empty()) throw ValidationError("config: no word vector file given");
  WordVectorTable words = load_word_vectors(config.word_vectors);

  std::unique_ptr<SentenceEmbedder> sentences;
  if (config.embedder.kind == EmbedderKind::kLocal) {
    sentences = std::make_unique<LocalHashEmbedder>();
  } else {
    if (config.embedder.endpoint.empty()) {
      throw ValidationError("config: remote embedder needs an endpoint");
    }
    RemoteEmbedderOptions options;
    options.url = config.embedder.endpoint;
    options.timeout = std::chrono::milliseconds(
        static_cast<std::int64_t>(config.embedder.timeout_seconds * 1000.0));
    options.dimension = config.embedder.dimension;
    if (const char* key = std::getenv(kEmbedderApiKeyEnv)) options.api_key = key;
    sentences = std::make_unique<RemoteEmbedder>(std::move(options));
  }
  return ProviderSet(std::move(words), std::move(sentences));
}

}  // namespace lost3dsg
