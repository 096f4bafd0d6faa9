// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file
/// ChatClient over an OpenAI-style chat-completions HTTP endpoint.
///
/// Define CPPHTTPLIB_OPENSSL_SUPPORT (and link OpenSSL) to reach https URLs.

#include <chrono>
#include <cstdlib>
#include <regex>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "faca/error.hpp"
#include "faca/negotiation.hpp"

namespace faca {

inline constexpr const char* kApiKeyEnv = "FACA_LLM_API_KEY";

struct ChatEndpoint {
  std::string url = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  int timeout_ms = 20000;
  int max_retries = 2;  ///< extra attempts after a 429 / 5xx / network error
  int retry_backoff_ms = 250;
  double temperature = 0.0;
};

class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(ChatEndpoint endpoint, std::string api_key = env_api_key())
      : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)) {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(endpoint_.url, m, url_re)) throw InvalidArgument("bad LLM endpoint url: " + endpoint_.url);
    origin_ = m[1].str();
    path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
  }

  static std::string env_api_key() {
    const char* key = std::getenv(kApiKeyEnv);
    return key ? key : "";
  }

  /// Request body sent for `messages`.
  nlohmann::json request_body(std::span<const ChatMessage> messages) const {
    nlohmann::json body;
    body["model"] = endpoint_.model;
    body["temperature"] = endpoint_.temperature;
    body["messages"] = nlohmann::json::array();
    for (const ChatMessage& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    return body;
  }

  std::string complete(std::span<const ChatMessage> messages) override {
    const std::string payload = request_body(messages).dump();
    std::string last_error;
    for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(endpoint_.retry_backoff_ms * attempt));

      httplib::Client client(origin_);
      const auto timeout = std::chrono::milliseconds(endpoint_.timeout_ms);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      httplib::Headers headers;
      if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

      auto res = client.Post(path_, headers, payload, "application/json");
      if (!res) {
        last_error = "request failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body);
      return extract_content(res->body);
    }
    throw TransportError(last_error);
  }

  /// Pulls choices[0].message.content out of a completion response.
  static std::string extract_content(const std::string& body) {
    const auto json = nlohmann::json::parse(body, nullptr, false);
    if (json.is_discarded()) throw TransportError("completion response is not JSON");
    try {
      return json.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("unexpected completion response: ") + e.what());
    }
  }

 private:
  ChatEndpoint endpoint_;
  std::string api_key_;
  std::string origin_;
  std::string path_;
};

}  // namespace faca
