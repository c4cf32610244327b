#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "lost3dsg/embeddings.hpp"
#include "lost3dsg/json_io.hpp"
#include "lost3dsg/similarity.hpp"
#include "lost3dsg/tracker.hpp"

namespace lost3dsg {

struct EmbedderSettings {
  EmbedderKind kind = EmbedderKind::kLocal;
  std::string endpoint;
  double timeout_seconds = 10.0;
  std::size_t dimension = 0;
};

/// Everything a run needs besides the scenario.
struct RunConfig {
  TrackerConfig tracker;
  EmbedderSettings embedder;
  /// Empty means "use the caller's default vector file".
  std::filesystem::path word_vectors;
};

/// Recognized keys: weights.{alpha,beta,gamma,delta}, components, tau,
/// epsilon, near, far, exploration, uncertain_recovery,
/// embedder.{kind,endpoint,timeout_s,dimension}, word_vectors. Every key is
/// optional; unknown keys are rejected. A relative word_vectors path is
/// resolved against base_dir.
RunConfig parse_run_config(const Json& document, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

Json run_config_to_json(const RunConfig& config);

/// Owns the word-vector table and the sentence embedder for one session.
class ProviderSet {
 public:
  ProviderSet(WordVectorTable words, std::unique_ptr<SentenceEmbedder> sentences);

  Providers view() const { return Providers{words_, *sentences_}; }
  const WordVectorTable& words() const { return words_; }
  SentenceEmbedder& sentences() const { return *sentences_; }

 private:
  WordVectorTable words_;
  std::unique_ptr<SentenceEmbedder> sentences_;
};

/// Loads config.word_vectors and builds the configured embedder. The remote
/// credential comes from the LOST3DSG_EMBEDDER_API_KEY environment variable.
ProviderSet make_providers(const RunConfig& config);

}  // namespace lost3dsg
