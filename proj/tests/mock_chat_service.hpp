#pragma once

// In-process chat-completion mocks for the negotiation contract tests.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "faca/negotiation.hpp"

namespace faca::testing {

/// The ambulance and ventilator exchange, spoken by robots "i" and "j".
inline const std::vector<std::string>& hospital_dialogue() {
  static const std::vector<std::string> lines{
      "robot j, conflict warning. I am transporting a critical patient to City General Hospital, my mission is "
      "top priority. I must maintain my current heading.",
      "Acknowledged, robot i. I am also on a critical mission, transporting time-sensitive medical equipment for "
      "emergency surgery. My priority is also maximal.",
      "Understood. My patient is unstable, and my distance to the hospital is 3.1km. What is your distance to goal?",
      "My distance to City General is 5.8km. Your patient's immediate proximity is more critical. I will yield. I "
      "am altering my course and reducing speed. Proceed safely."};
  return lines;
}

inline constexpr const char* kHospitalAgreement = "{i: high priority, j: low priority}";
inline constexpr const char* kNoAgreement = "NO AGREEMENT";

enum class MockMode { kHospitalDialogue, kNeverAgree, kStall };

/// Answers negotiation turns from a script and referee requests with the
/// agreement once the whole script has been spoken.
class MockChatService final : public ChatClient {
 public:
  explicit MockChatService(MockMode mode = MockMode::kHospitalDialogue) : mode_(mode) {}

  std::string complete(std::span<const ChatMessage> messages) override {
    std::lock_guard lock(mu_);
    ++requests_;
    if (!messages.empty() && messages.front().content.starts_with("You are a neutral referee")) {
      ++referee_requests_;
      const std::string& dialogue = messages.back().content;
      const auto spoken = static_cast<std::size_t>(std::count(dialogue.begin(), dialogue.end(), '\n'));
      if (mode_ == MockMode::kHospitalDialogue && spoken >= hospital_dialogue().size()) return kHospitalAgreement;
      return kNoAgreement;
    }
    const std::size_t turn = turns_++;
    if (mode_ == MockMode::kNeverAgree) {
      return "I still believe my mission should go first (turn " + std::to_string(turn) + ").";
    }
    return hospital_dialogue()[turn % hospital_dialogue().size()];
  }

  int requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }
  int referee_requests() const {
    std::lock_guard lock(mu_);
    return referee_requests_;
  }

 private:
  MockMode mode_;
  mutable std::mutex mu_;
  std::size_t turns_ = 0;
  int requests_ = 0;
  int referee_requests_ = 0;
};

/// The same mock behind an OpenAI-style HTTP endpoint on 127.0.0.1.
class MockChatServer {
 public:
  explicit MockChatServer(MockMode mode, std::chrono::milliseconds stall = std::chrono::milliseconds(600))
      : service_(mode == MockMode::kStall ? MockMode::kHospitalDialogue : mode), mode_(mode), stall_(stall) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      const auto body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.contains("messages")) {
        res.status = 400;
        return;
      }
      {
        std::lock_guard lock(mu_);
        last_request_ = req.body;
        authorization_ = req.get_header_value("Authorization");
      }
      if (mode_ == MockMode::kStall) std::this_thread::sleep_for(stall_);
      std::vector<ChatMessage> messages;
      for (const auto& m : body["messages"]) messages.push_back({m.at("role"), m.at("content")});
      const nlohmann::json reply{
          {"choices", nlohmann::json::array({{{"index", 0},
                                              {"message", {{"role", "assistant"}, {"content", service_.complete(messages)}}}}})}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockChatServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  MockChatServer(const MockChatServer&) = delete;
  MockChatServer& operator=(const MockChatServer&) = delete;

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  int hits() const { return hits_; }
  std::string last_request() const {
    std::lock_guard lock(mu_);
    return last_request_;
  }
  std::string authorization() const {
    std::lock_guard lock(mu_);
    return authorization_;
  }

 private:
  MockChatService service_;
  MockMode mode_;
  std::chrono::milliseconds stall_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> hits_{0};
  mutable std::mutex mu_;
  std::string last_request_;
  std::string authorization_;
};

inline MissionContext patient_robot() {
  MissionContext ctx;
  ctx.robot_id = "i";
  ctx.mission_text = "Transporting a critical patient to City General Hospital";
  ctx.priority = 5.0;
  ctx.distance_to_goal = 3100.0;
  return ctx;
}

inline MissionContext ventilator_robot() {
  MissionContext ctx;
  ctx.robot_id = "j";
  ctx.mission_text = "Transporting a ventilator for emergency surgery at City General Hospital";
  ctx.priority = 5.0;
  ctx.distance_to_goal = 5800.0;
  return ctx;
}

}  // namespace faca::testing
