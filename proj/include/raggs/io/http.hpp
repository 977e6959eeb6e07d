#pragma once

// Thin HTTP adapters for a remote judge and a remote embedding provider.
//
//   judge      POST {"items": [{"id", "text"}, ...]}  ->  {"order": [id, ...]}
//   embedding  POST {"texts": [...]}                  ->  {"vectors": [[...], ...]}

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "httplib.h"

#include "raggs/core/error.hpp"
#include "raggs/diagnostics/embedding.hpp"
#include "raggs/io/jsonl.hpp"
#include "raggs/judge.hpp"

namespace raggs::io {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;

  static Endpoint parse(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw InvalidInput("endpoint URL needs a scheme: '" + url + "'");
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
  }
};

namespace detail {

template <typename Error>
json post_json(const Endpoint& ep, const json& body, int timeout_s) {
  httplib::Client client(ep.origin);
  client.set_connection_timeout(timeout_s, 0);
  client.set_read_timeout(timeout_s, 0);
  auto res = client.Post(ep.path, body.dump(), "application/json");
  if (!res) throw Error("request to " + ep.origin + ep.path + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error("request to " + ep.origin + ep.path + " returned HTTP " + std::to_string(res->status));
  try {
    return json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed response body: ") + e.what());
  }
}

}  // namespace detail

class HttpJudge final : public Judge {
 public:
  explicit HttpJudge(const std::string& url, int timeout_s = 60) : ep_(Endpoint::parse(url)), timeout_s_(timeout_s) {}

  std::vector<std::string> rank(std::span<const JudgeItem> batch) override {
    json items = json::array();
    for (const auto& it : batch) items.push_back({{"id", it.id}, {"text", it.text}});
    const json reply = detail::post_json<JudgeError>(ep_, {{"items", items}}, timeout_s_);
    if (!reply.contains("order") || !reply["order"].is_array()) throw JudgeError("judge reply lacks an 'order' array");
    std::vector<std::string> order;
    for (const auto& id : reply["order"]) {
      if (!id.is_string()) throw JudgeError("judge reply order must hold strings");
      order.push_back(id.get<std::string>());
    }
    return order;
  }

 private:
  Endpoint ep_;
  int timeout_s_;
};

class HttpEmbedder final : public diag::EmbeddingProvider {
 public:
  HttpEmbedder(std::string label, const std::string& url, int timeout_s = 60)
      : label_(std::move(label)), ep_(Endpoint::parse(url)), timeout_s_(timeout_s) {}

  std::string label() const override { return label_; }

  std::vector<diag::Vector> embed(std::span<const std::string> texts) override {
    json body{{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    const json reply = detail::post_json<InvalidInput>(ep_, body, timeout_s_);
    if (!reply.contains("vectors") || !reply["vectors"].is_array())
      throw InvalidInput("embedding reply lacks a 'vectors' array");
    std::vector<diag::Vector> out;
    for (const auto& v : reply["vectors"]) out.push_back(v.get<diag::Vector>());
    if (out.size() != texts.size()) throw InvalidInput("embedding reply has the wrong number of vectors");
    return out;
  }

 private:
  std::string label_;
  Endpoint ep_;
  int timeout_s_;
};

}  // namespace raggs::io
