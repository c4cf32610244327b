#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "lost3dsg/core_graph.hpp"
#include "lost3dsg/embeddings.hpp"

namespace lost3dsg {

enum class Component : std::uint8_t { kLabel = 0, kColor = 1, kMaterial = 2, kDescription = 3 };

inline constexpr std::array<Component, 4> kAllComponents{
    Component::kLabel, Component::kColor, Component::kMaterial, Component::kDescription};

std::string_view to_string(Component component);

/// Subset of LSF components.
class ComponentSet {
 public:
  constexpr ComponentSet() = default;
  static constexpr ComponentSet all() { return ComponentSet(0b1111); }
  static ComponentSet of(std::initializer_list<Component> components);

  /// Accepts "full"/"all", or a comma-separated list of names
  /// (label|l, color|c, material|m, description|d; an "s_" prefix is allowed).
  static ComponentSet parse(std::string_view text);

  bool contains(Component c) const { return (bits_ >> static_cast<unsigned>(c)) & 1u; }
  void insert(Component c) { bits_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(c)); }
  bool empty() const { return bits_ == 0; }
  bool is_full() const { return bits_ == 0b1111; }

  /// "full" or e.g. "label,description".
  std::string to_string() const;

  friend bool operator==(const ComponentSet&, const ComponentSet&) = default;

 private:
  constexpr explicit ComponentSet(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0;
};

/// Component weights; they must sum to one. Defaults are the reference
/// label/color/material/description weights.
struct LsfWeights {
  double alpha = 0.15;
  double beta = 0.30;
  double gamma = 0.15;
  double delta = 0.40;

  double operator[](Component c) const;
  /// Throws ValidationError if a weight leaves [0, 1] or the sum is off by more than 1e-9.
  void validate() const;
};

struct LsfConfig {
  LsfWeights weights;
  ComponentSet components = ComponentSet::all();
  double tau = 0.75;

  void validate() const;

  /// Weights of the enabled components rescaled proportionally to sum to one;
  /// zero for disabled components. Uniform over the enabled set if all of
  /// their configured weights are zero.
  std::array<double, 4> effective_weights() const;
};

struct ComponentScores {
  double label = 0.0;
  double color = 0.0;
  double material = 0.0;
  double description = 0.0;

  double operator[](Component c) const;
};

/// Similarity providers shared by every comparison in a session.
struct Providers {
  const WordVectorTable& words;
  SentenceEmbedder& sentences;
};

/// 1 - |rgb1 - rgb2| / sqrt(3).
double chromatic_similarity(const RGBColor& a, const RGBColor& b);

/// Clamped cosine of sentence embeddings. Two empty descriptions score 1,
/// one empty description scores 0.
double description_similarity(std::string_view a, std::string_view b,
                              SentenceEmbedder& embedder);

double component_score(Component component, const SemanticAttributes& a,
                       const SemanticAttributes& b, const Providers& providers);

ComponentScores component_scores(const SemanticAttributes& a, const SemanticAttributes& b,
                                 const Providers& providers);

/// Weighted sum of the enabled components of precomputed scores.
double lsf(const ComponentScores& scores, const LsfConfig& config);

/// Evaluates only the enabled components, so a disabled description never
/// reaches the sentence embedder.
double lsf(const SemanticAttributes& a, const SemanticAttributes& b, const LsfConfig& config,
           const Providers& providers);

struct Match {
  NodeId id;
  double score = 0.0;
};

/// Highest-scoring unclaimed candidate, if its score reaches config.tau.
/// Ties go to the smaller id.
std::optional<Match> find_best_match(const SemanticAttributes& detection,
                                     std::span<const ObjectNode* const> candidates,
                                     const LsfConfig& config, const Providers& providers,
                                     const std::set<NodeId>& claimed);

}  // namespace lost3dsg
