#include "lost3dsg/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace lost3dsg {

std::string_view to_string(Component component) {
  switch (component) {
    case Component::kLabel:
      return "label";
    case Component::kColor:
      return "color";
    case Component::kMaterial:
      return "material";
    case Component::kDescription:
      return "description";
  }
  return "label";
}

ComponentSet ComponentSet::of(std::initializer_list<Component> components) {
  ComponentSet set;
  for (const Component c : components) set.insert(c);
  return set;
}

ComponentSet ComponentSet::parse(std::string_view text) {
  const auto trimmed = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  text = trimmed(text);
  if (text == "full" || text == "all") return all();

  ComponentSet set;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view name = trimmed(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (name.starts_with("s_")) name.remove_prefix(2);
    if (name == "label" || name == "l") {
      set.insert(Component::kLabel);
    } else if (name == "color" || name == "c") {
      set.insert(Component::kColor);
    } else if (name == "material" || name == "m") {
      set.insert(Component::kMaterial);
    } else if (name == "description" || name == "d") {
      set.insert(Component::kDescription);
    } else {
      throw ValidationError("unknown LSF component '" + std::string(name) + "'");
    }
  }
  if (set.empty()) throw ValidationError("LSF component set must not be empty");
  return set;
}

std::string ComponentSet::to_string() const {
  if (is_full()) return "full";
  std::string out;
  for (const Component c : kAllComponents) {
    if (!contains(c)) continue;
    if (!out.empty()) out += ',';
    out += lost3dsg::to_string(c);
  }
  return out;
}

double LsfWeights::operator[](Component c) const {
  switch (c) {
    case Component::kLabel:
      return alpha;
    case Component::kColor:
      return beta;
    case Component::kMaterial:
      return gamma;
    case Component::kDescription:
      return delta;
  }
  return 0.0;
}

void LsfWeights::validate() const {
  for (const Component c : kAllComponents) {
    const double w = (*this)[c];
    if (!(w >= 0.0 && w <= 1.0)) {
      throw ValidationError("LSF weight for " + std::string(to_string(c)) +
                            " must lie in [0, 1]");
    }
  }
  const double sum = alpha + beta + gamma + delta;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("LSF weights must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

void LsfConfig::validate() const {
  weights.validate();
  if (components.empty()) throw ValidationError("LSF component set must not be empty");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("LSF threshold tau must lie in [0, 1]");
}

std::array<double, 4> LsfConfig::effective_weights() const {
  std::array<double, 4> out{};
  double enabled_sum = 0.0;
  std::size_t enabled = 0;
  for (const Component c : kAllComponents) {
    if (!components.contains(c)) continue;
    enabled_sum += weights[c];
    ++enabled;
  }
  for (const Component c : kAllComponents) {
    if (!components.contains(c)) continue;
    out[static_cast<std::size_t>(c)] =
        enabled_sum > 0.0 ? weights[c] / enabled_sum : 1.0 / static_cast<double>(enabled);
  }
  return out;
}

double ComponentScores::operator[](Component c) const {
  switch (c) {
    case Component::kLabel:
      return label;
    case Component::kColor:
      return color;
    case Component::kMaterial:
      return material;
    case Component::kDescription:
      return description;
  }
  return 0.0;
}

double chromatic_similarity(const RGBColor& a, const RGBColor& b) {
  const double dr = a.r - b.r;
  const double dg = a.g - b.g;
  const double db = a.b - b.b;
  return 1.0 - std::sqrt(dr * dr + dg * dg + db * db) / std::sqrt(3.0);
}

double description_similarity(std::string_view a, std::string_view b,
                              SentenceEmbedder& embedder) {
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 1.0 : 0.0;
  if (a == b) return 1.0;
  const std::string texts[2] = {std::string(a), std::string(b)};
  const auto vectors = embedder.embed_batch(texts);
  return std::clamp(cosine(vectors[0], vectors[1]), 0.0, 1.0);
}

double component_score(Component component, const SemanticAttributes& a,
                       const SemanticAttributes& b, const Providers& providers) {
  switch (component) {
    case Component::kLabel:
      return word_similarity(a.label, b.label, providers.words);
    case Component::kColor:
      return chromatic_similarity(color_to_rgb(a.color), color_to_rgb(b.color));
    case Component::kMaterial:
      return word_similarity(a.material, b.material, providers.words);
    case Component::kDescription:
      return description_similarity(a.description, b.description, providers.sentences);
  }
  return 0.0;
}

ComponentScores component_scores(const SemanticAttributes& a, const SemanticAttributes& b,
                                 const Providers& providers) {
  return ComponentScores{component_score(Component::kLabel, a, b, providers),
                         component_score(Component::kColor, a, b, providers),
                         component_score(Component::kMaterial, a, b, providers),
                         component_score(Component::kDescription, a, b, providers)};
}

double lsf(const ComponentScores& scores, const LsfConfig& config) {
  const auto w = config.effective_weights();
  double total = 0.0;
  for (const Component c : kAllComponents) {
    if (config.components.contains(c)) total += w[static_cast<std::size_t>(c)] * scores[c];
  }
  return std::clamp(total, 0.0, 1.0);
}

double lsf(const SemanticAttributes& a, const SemanticAttributes& b, const LsfConfig& config,
           const Providers& providers) {
  const auto w = config.effective_weights();
  double total = 0.0;
  for (const Component c : kAllComponents) {
    if (config.components.contains(c)) {
      total += w[static_cast<std::size_t>(c)] * component_score(c, a, b, providers);
    }
  }
  return std::clamp(total, 0.0, 1.0);
}

std::optional<Match> find_best_match(const SemanticAttributes& detection,
                                     std::span<const ObjectNode* const> candidates,
                                     const LsfConfig& config, const Providers& providers,
                                     const std::set<NodeId>& claimed) {
  std::optional<Match> best;
  for (const ObjectNode* candidate : candidates) {
    if (claimed.contains(candidate->id)) continue;
    const double score = lsf(detection, candidate->attributes, config, providers);
    if (!best || score > best->score || (score == best->score && candidate->id < best->id)) {
      best = Match{candidate->id, score};
    }
  }
  if (best && best->score >= config.tau) return best;
  return std::nullopt;
}

}  // namespace lost3dsg
