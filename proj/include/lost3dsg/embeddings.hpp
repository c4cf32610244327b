#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lost3dsg/error.hpp"

namespace lost3dsg {

using Embedding = std::vector<double>;

/// Scales v to unit L2 norm. Returns false (leaving v untouched) for a zero vector.
bool normalize(Embedding& v);

/// Plain cosine of two equal-length vectors; 0 if either has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

/// Word vectors keyed by lowercase token, stored at unit norm.
class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }

  /// Lowercases token and normalizes vector. The first insertion of a token
  /// wins; returns false for a later duplicate.
  bool insert(std::string token, Embedding vector);

  /// Lookup by token (lowercased before lookup).
  const Embedding* find(std::string_view token) const;

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, Embedding> entries_;
};

/// Reads the whitespace-separated text vector format: an optional
/// "count dim" header, then "token v1 ... vdim" per line. Blank lines are
/// skipped. Throws ValidationError naming the 1-based line number on
/// malformed rows or dimension mismatches.
WordVectorTable load_word_vectors(std::istream& in);
WordVectorTable load_word_vectors(const std::filesystem::path& path);

/// Whitespace split, ASCII lowercase, punctuation stripped, empties dropped.
std::vector<std::string> tokenize(std::string_view phrase);

/// Mean of the in-vocabulary token vectors, renormalized; nullopt when no
/// token is in the vocabulary.
std::optional<Embedding> phrase_vector(std::string_view phrase, const WordVectorTable& table);

/// Cosine of phrase vectors clamped to [0, 1]. When either phrase has no
/// known token, falls back to case-insensitive equality (1 or 0).
double word_similarity(std::string_view a, std::string_view b, const WordVectorTable& table);

enum class EmbedderKind { kRemote, kLocal };

/// Text to unit-vector provider with a per-session memo. Safe to call from
/// several threads.
class SentenceEmbedder {
 public:
  virtual ~SentenceEmbedder() = default;

  virtual EmbedderKind kind() const = 0;
  /// 0 until a remote provider has answered at least once.
  virtual std::size_t dimension() const = 0;

  /// Throws ValidationError on empty text, ProviderError on provider failure.
  Embedding embed(std::string_view text);
  std::vector<Embedding> embed_batch(std::span<const std::string> texts);

 protected:
  /// Produces one unit vector per text; texts are non-empty.
  virtual std::vector<Embedding> compute(std::span<const std::string> texts) = 0;

 private:
  std::mutex memo_mutex_;
  std::unordered_map<std::string, Embedding> memo_;
};

/// Offline embedder: character 3-grams of the lowercased text hashed
/// (32-bit FNV-1a) into a 256-bin count vector, then L2-normalized. Texts
/// shorter than three bytes hash as a single gram.
class LocalHashEmbedder final : public SentenceEmbedder {
 public:
  static constexpr std::size_t kDimension = 256;

  EmbedderKind kind() const override { return EmbedderKind::kLocal; }
  std::size_t dimension() const override { return kDimension; }

 protected:
  std::vector<Embedding> compute(std::span<const std::string> texts) override;
};

struct RemoteEmbedderOptions {
  /// Full endpoint URL, e.g. "http://127.0.0.1:8080/embed".
  std::string url;
  std::chrono::milliseconds timeout{10'000};
  /// Expected dimension; 0 accepts whatever the first response carries.
  std::size_t dimension = 0;
  /// Sent as a bearer token when non-empty.
  std::string api_key;
};

/// Environment variable consulted for the remote embedder credential.
inline constexpr const char* kEmbedderApiKeyEnv = "LOST3DSG_EMBEDDER_API_KEY";

/// POSTs {"texts": [...]} and expects {"embeddings": [[...], ...]}; vectors
/// are normalized on receipt.
class RemoteEmbedder final : public SentenceEmbedder {
 public:
  explicit RemoteEmbedder(RemoteEmbedderOptions options);

  EmbedderKind kind() const override { return EmbedderKind::kRemote; }
  std::size_t dimension() const override;

  const RemoteEmbedderOptions& options() const { return options_; }

 protected:
  std::vector<Embedding> compute(std::span<const std::string> texts) override;

 private:
  RemoteEmbedderOptions options_;
  std::string scheme_host_port_;
  std::string path_;
  mutable std::mutex dimension_mutex_;
  std::size_t dimension_;
};

Embedding embed_sentence(std::string_view text, SentenceEmbedder& embedder);

struct RGBColor {
  double r = 0.5;
  double g = 0.5;
  double b = 0.5;

  friend bool operator==(const RGBColor&, const RGBColor&) = default;
};

std::optional<RGBColor> lookup_css_color(std::string_view name);
std::size_t css_color_count();

/// Total mapping from a color phrase to RGB. Exact table hit on the trimmed
/// lowercase phrase first; otherwise the mean of every word that resolves;
/// otherwise neutral gray.
RGBColor color_to_rgb(std::string_view name);

}  // namespace lost3dsg
