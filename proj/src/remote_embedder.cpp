#include <algorithm>
#include <thread>

#include "aspect/embedding.hpp"
#include "aspect/error.hpp"
#include "aspect/http.hpp"
#include "httplib.h"
#include "json.hpp"

namespace aspect::embedding {

using nlohmann::json;

RemoteEmbedder::RemoteEmbedder(EmbeddingProviderConfig config) : config_(std::move(config)) {
  if (config_.kind != ProviderKind::remote) config_.kind = ProviderKind::remote;
  config_.validate();
  http::parse_endpoint(*config_.endpoint);
}

std::vector<EmbeddingVector> RemoteEmbedder::request(std::span<const std::string> texts) const {
  const auto endpoint = http::parse_endpoint(*config_.endpoint);
  // One client per request; httplib clients are not shared across threads.
  httplib::Client client(endpoint.origin);
  const auto secs = config_.timeout.count() / 1000;
  const auto usecs = (config_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  json body = {{"model", *config_.model_name},
               {"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  auto res = client.Post(endpoint.path, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::Transport,
                "embedding request failed: " + httplib::to_string(res.error()), std::nullopt,
                true);
  }
  if (res->status >= 500) {
    throw Error(ErrorKind::Transport,
                "embedding server returned " + std::to_string(res->status) + ": " + res->body,
                std::nullopt, true);
  }
  if (res->status != 200) {
    throw Error(ErrorKind::RemoteRejected,
                "embedding server returned " + std::to_string(res->status) + ": " + res->body);
  }

  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaMismatch, std::string("embedding reply is not JSON: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array()) {
    throw Error(ErrorKind::SchemaMismatch, "embedding reply lacks a \"vectors\" array");
  }
  const auto& vectors = reply["vectors"];
  if (vectors.size() != texts.size()) {
    throw Error(ErrorKind::SchemaMismatch,
                "embedding reply has " + std::to_string(vectors.size()) + " vectors for " +
                    std::to_string(texts.size()) + " texts");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (!v.is_array()) throw Error(ErrorKind::SchemaMismatch, "vector entry is not an array");
    if (v.size() != config_.dim) {
      throw Error(ErrorKind::RemoteDimension,
                  "remote vector has dim " + std::to_string(v.size()) + ", expected " +
                      std::to_string(config_.dim));
    }
    std::vector<double> values;
    values.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) throw Error(ErrorKind::SchemaMismatch, "non-numeric vector component");
      values.push_back(x.get<double>());
    }
    try {
      out.push_back(normalized(EmbeddingVector(std::move(values))));
    } catch (const Error& e) {
      throw Error(ErrorKind::SchemaMismatch, std::string("invalid remote vector: ") + e.what());
    }
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(
    std::span<const std::string> texts) const {
  if (texts.empty()) throw Error(ErrorKind::EmptyInput, "embed_batch of an empty list");
  for (const auto& t : texts) {
    if (t.empty()) throw Error(ErrorKind::EmptyInput, "cannot embed an empty text");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
    const auto count = std::min(config_.batch_size, texts.size() - start);
    const auto chunk = texts.subspan(start, count);
    for (std::size_t attempt = 0;; ++attempt) {
      try {
        auto part = request(chunk);
        std::move(part.begin(), part.end(), std::back_inserter(out));
        break;
      } catch (const Error& e) {
        if (!e.retryable() || attempt >= config_.max_retries) throw;
        std::this_thread::sleep_for(std::chrono::milliseconds(100 << attempt));
      }
    }
  }
  return out;
}

}  // namespace aspect::embedding
