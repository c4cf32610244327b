#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

#include "lost3dsg/embeddings.hpp"

namespace lost3dsg {

namespace {

// Splits "scheme://host[:port]/path" into the client base and request path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("embedder endpoint '" + url + "' must start with http:// or https://");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ValidationError("embedder endpoint '" + url + "' must use http or https");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderOptions options)
    : options_(std::move(options)), dimension_(options_.dimension) {
  std::tie(scheme_host_port_, path_) = split_url(options_.url);
  if (options_.timeout.count() <= 0) throw ValidationError("embedder timeout must be positive");
}

std::size_t RemoteEmbedder::dimension() const {
  std::lock_guard lock(dimension_mutex_);
  return dimension_;
}

std::vector<Embedding> RemoteEmbedder::compute(std::span<const std::string> texts) {
  httplib::Client client(scheme_host_port_);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }

  const nlohmann::json request{{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto result = client.Post(path_, headers, request.dump(), "application/json");
  if (!result) {
    throw ProviderError("embedder request to " + options_.url +
                        " failed: " + httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw ProviderError("embedder at " + options_.url + " returned HTTP " +
                        std::to_string(result->status));
  }

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProviderError(std::string("embedder response is not JSON: ") + e.what());
  }
  const auto it = body.find("embeddings");
  if (it == body.end() || !it->is_array() || it->size() != texts.size()) {
    throw ProviderError("embedder response must carry one 'embeddings' row per text");
  }

  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& row : *it) {
    if (!row.is_array() || row.empty()) throw ProviderError("embedder returned an empty vector");
    Embedding v;
    v.reserve(row.size());
    for (const auto& x : row) {
      if (!x.is_number()) throw ProviderError("embedder returned a non-numeric component");
      v.push_back(x.get<double>());
    }
    if (!normalize(v)) throw ProviderError("embedder returned a zero vector");
    out.push_back(std::move(v));
  }

  std::lock_guard lock(dimension_mutex_);
  for (const Embedding& v : out) {
    if (dimension_ == 0) dimension_ = v.size();
    if (v.size() != dimension_) {
      throw ProviderError("embedder returned dimension " + std::to_string(v.size()) +
                          ", expected " + std::to_string(dimension_));
    }
  }
  return out;
}

}  // namespace lost3dsg
