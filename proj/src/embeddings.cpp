#include "lost3dsg/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace lost3dsg {

namespace {

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view text) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<std::size_t> parse_count(std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::uint32_t fnv1a(std::string_view bytes) {
  std::uint32_t hash = 2166136261u;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 16777619u;
  }
  return hash;
}

}  // namespace

bool normalize(Embedding& v) {
  double sq = 0.0;
  for (const double x : v) sq += x * x;
  if (sq == 0.0 || !std::isfinite(sq)) return false;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
  return true;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine: vector dimensions differ");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

WordVectorTable::WordVectorTable(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw ValidationError("word vector dimension must be positive");
}

bool WordVectorTable::insert(std::string token, Embedding vector) {
  if (vector.size() != dimension_) {
    throw ValidationError("word vector for '" + token + "' has dimension " +
                          std::to_string(vector.size()) + ", expected " +
                          std::to_string(dimension_));
  }
  std::string key = ascii_lower(token);
  if (entries_.contains(key)) return false;
  if (!normalize(vector)) throw ValidationError("word vector for '" + token + "' is all zeros");
  entries_.emplace(std::move(key), std::move(vector));
  return true;
}

const Embedding* WordVectorTable::find(std::string_view token) const {
  const auto it = entries_.find(ascii_lower(token));
  return it == entries_.end() ? nullptr : &it->second;
}

WordVectorTable load_word_vectors(std::istream& in) {
  std::optional<WordVectorTable> table;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;

  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    const std::string where = "word vectors line " + std::to_string(line_no) + ": ";

    if (first_content) {
      first_content = false;
      if (fields.size() == 2) {
        const auto header_count = parse_count(fields[0]);
        const auto header_dim = parse_count(fields[1]);
        if (header_count && header_dim) {
          if (*header_dim == 0) throw ValidationError(where + "header dimension must be positive");
          table.emplace(*header_dim);
          continue;
        }
      }
    }
    if (fields.size() < 2) throw ValidationError(where + "expected a token followed by values");
    if (!table) table.emplace(fields.size() - 1);
    if (fields.size() - 1 != table->dimension()) {
      throw ValidationError(where + "dimension mismatch: " + std::to_string(fields.size() - 1) +
                            " values, expected " + std::to_string(table->dimension()));
    }
    Embedding vector;
    vector.reserve(table->dimension());
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto value = parse_double(fields[i]);
      if (!value) {
        throw ValidationError(where + "malformed value '" + std::string(fields[i]) + "'");
      }
      vector.push_back(*value);
    }
    try {
      table->insert(std::string(fields[0]), std::move(vector));
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  if (!table) throw ValidationError("word vectors: no entries");
  return std::move(*table);
}

WordVectorTable load_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open word vector file " + path.string());
  return load_word_vectors(in);
}

std::vector<std::string> tokenize(std::string_view phrase) {
  std::vector<std::string> tokens;
  for (const std::string_view field : split_whitespace(phrase)) {
    std::string token;
    for (const char c : field) {
      const auto byte = static_cast<unsigned char>(c);
      if (std::ispunct(byte)) continue;
      token.push_back(static_cast<char>(std::tolower(byte)));
    }
    if (!token.empty()) tokens.push_back(std::move(token));
  }
  return tokens;
}

std::optional<Embedding> phrase_vector(std::string_view phrase, const WordVectorTable& table) {
  Embedding sum(table.dimension(), 0.0);
  std::size_t hits = 0;
  for (const std::string& token : tokenize(phrase)) {
    if (const Embedding* v = table.find(token)) {
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
      ++hits;
    }
  }
  if (hits == 0) return std::nullopt;
  for (double& x : sum) x /= static_cast<double>(hits);
  // A zero mean (cancelling tokens) stays zero and scores 0 against everything.
  normalize(sum);
  return sum;
}

double word_similarity(std::string_view a, std::string_view b, const WordVectorTable& table) {
  const auto va = phrase_vector(a, table);
  const auto vb = phrase_vector(b, table);
  if (!va || !vb) return ascii_lower(trim(a)) == ascii_lower(trim(b)) ? 1.0 : 0.0;
  return std::clamp(cosine(*va, *vb), 0.0, 1.0);
}

Embedding SentenceEmbedder::embed(std::string_view text) {
  const std::string key(text);
  return embed_batch(std::span<const std::string>(&key, 1)).front();
}

std::vector<Embedding> SentenceEmbedder::embed_batch(std::span<const std::string> texts) {
  std::vector<Embedding> out(texts.size());
  std::vector<std::string> missing;
  std::vector<std::size_t> missing_slots;
  {
    std::lock_guard lock(memo_mutex_);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (texts[i].empty()) throw ValidationError("cannot embed empty text");
      if (const auto it = memo_.find(texts[i]); it != memo_.end()) {
        out[i] = it->second;
      } else {
        missing.push_back(texts[i]);
        missing_slots.push_back(i);
      }
    }
  }
  if (missing.empty()) return out;

  std::vector<Embedding> computed = compute(missing);
  if (computed.size() != missing.size()) {
    throw ProviderError("embedder returned " + std::to_string(computed.size()) +
                        " vectors for " + std::to_string(missing.size()) + " texts");
  }
  std::lock_guard lock(memo_mutex_);
  for (std::size_t j = 0; j < missing.size(); ++j) {
    memo_.emplace(missing[j], computed[j]);
    out[missing_slots[j]] = std::move(computed[j]);
  }
  return out;
}

std::vector<Embedding> LocalHashEmbedder::compute(std::span<const std::string> texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const std::string& raw : texts) {
    const std::string text = ascii_lower(raw);
    Embedding bins(kDimension, 0.0);
    if (text.size() < 3) {
      bins[fnv1a(text) % kDimension] += 1.0;
    } else {
      for (std::size_t i = 0; i + 3 <= text.size(); ++i) {
        bins[fnv1a(std::string_view(text).substr(i, 3)) % kDimension] += 1.0;
      }
    }
    normalize(bins);
    out.push_back(std::move(bins));
  }
  return out;
}

Embedding embed_sentence(std::string_view text, SentenceEmbedder& embedder) {
  return embedder.embed(text);
}

RGBColor color_to_rgb(std::string_view name) {
  const std::string phrase = ascii_lower(trim(name));
  if (const auto exact = lookup_css_color(phrase)) return *exact;

  RGBColor sum{0.0, 0.0, 0.0};
  std::size_t hits = 0;
  for (const std::string& word : tokenize(phrase)) {
    if (const auto c = lookup_css_color(word)) {
      sum.r += c->r;
      sum.g += c->g;
      sum.b += c->b;
      ++hits;
    }
  }
  if (hits == 0) return RGBColor{0.5, 0.5, 0.5};
  const double n = static_cast<double>(hits);
  return RGBColor{sum.r / n, sum.g / n, sum.b / n};
}

}  // namespace lost3dsg
