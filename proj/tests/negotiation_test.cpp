#include <chrono>
#include <random>
#include <string>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "faca/chat_client.hpp"
#include "faca/negotiation.hpp"
#include "mock_chat_service.hpp"

namespace faca {
namespace {

using ::testing::_;
using ::testing::Return;
using ::testing::Throw;
using testing::MockChatServer;
using testing::MockChatService;
using testing::MockMode;
using testing::patient_robot;
using testing::ventilator_robot;

class MockClient : public ChatClient {
 public:
  MOCK_METHOD(std::string, complete, (std::span<const ChatMessage> messages), (override));
};

MissionContext context(const char* id, double priority, double distance) {
  MissionContext ctx;
  ctx.robot_id = id;
  ctx.priority = priority;
  ctx.distance_to_goal = distance;
  return ctx;
}

TEST(SessionRegistry, OpensOrderedPair) {
  SessionRegistry registry;
  const NegotiationSession s = registry.open(context("B", 1, 1), context("A", 1, 1), 3);
  EXPECT_EQ(s.pair, (RobotPair{"A", "B"}));
  EXPECT_TRUE(s.transcript.empty());
  EXPECT_TRUE(registry.is_open("B", "A"));
}

TEST(SessionRegistry, RejectsDuplicatesAndSelf) {
  SessionRegistry registry;
  EXPECT_THROW(registry.open(context("A", 1, 1), context("A", 1, 1), 3), SamePair);
  registry.open(context("A", 1, 1), context("B", 1, 1), 3);
  EXPECT_THROW(registry.open(context("B", 1, 1), context("A", 1, 1), 3), SamePair);
  registry.close({"B", "A"});
  EXPECT_EQ(registry.size(), 0u);
  EXPECT_NO_THROW(registry.open(context("B", 1, 1), context("A", 1, 1), 3));
  EXPECT_THROW(registry.open(context("C", 1, 1), context("D", 1, 1), 0), InvalidArgument);
}

TEST(NegotiationSession, SpeakersAlternateWithinBudget) {
  NegotiationSession s;
  s.pair = {"A", "B"};
  s.max_rounds = 1;
  EXPECT_THROW(s.append("B", "hi"), InvalidArgument);
  s.append("A", "hi");
  EXPECT_THROW(s.append("A", "again"), InvalidArgument);
  s.append("B", "hello");
  EXPECT_THROW(s.append("A", "more"), InvalidArgument);
  EXPECT_EQ(s.transcript.size(), 2u);
}

TEST(ScriptedNegotiate, Examples) {
  EXPECT_EQ(scripted_negotiate(context("i", 5, 9), context("j", 2, 1)).high, "i");
  EXPECT_EQ(scripted_negotiate(context("i", 5, 3.1), context("j", 5, 5.8)).high, "i");
  EXPECT_EQ(scripted_negotiate(context("B", 5, 3), context("A", 5, 3)).high, "A");
  const PriorityAssignment a = scripted_negotiate(context("i", 5, 9), context("j", 2, 1));
  EXPECT_EQ(a.new_priorities.at("i"), 6.0);
  EXPECT_EQ(a.new_priorities.at("j"), 2.0);
  EXPECT_THROW(scripted_negotiate(context("i", 1, 1), context("i", 1, 1)), InvalidArgument);
}

TEST(ScriptedNegotiate, IsATotalOrder) {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> level(1, 3);
  std::uniform_int_distribution<int> dist(0, 2);
  for (int k = 0; k < 500; ++k) {
    const MissionContext a = context("a", level(rng), dist(rng));
    const MissionContext b = context("b", level(rng), dist(rng));
    const PriorityAssignment ab = scripted_negotiate(a, b);
    const PriorityAssignment ba = scripted_negotiate(b, a);
    EXPECT_EQ(ab, ba);
    EXPECT_NE(ab.high, ab.low);
    EXPECT_GT(ab.new_priorities.at(ab.high), ab.new_priorities.at(ab.low));
    EXPECT_EQ(scripted_negotiate(a, b), ab);
  }
}

TEST(ParseAgreement, Examples) {
  const auto a = parse_agreement("Agreement: {robot_1: high priority, robot_2: low priority}");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->high, "robot_1");
  EXPECT_EQ(a->low, "robot_2");
  EXPECT_TRUE(a->new_priorities.empty());
  EXPECT_FALSE(parse_agreement("we should keep talking"));
  EXPECT_FALSE(parse_agreement("{x: high priority, x: low priority}"));
}

TEST(ParseAgreement, ExactFormatAndVariants) {
  const auto exact = parse_agreement("{i: high priority, j: low priority}");
  ASSERT_TRUE(exact);
  EXPECT_EQ(exact->high, "i");
  EXPECT_EQ(exact->low, "j");
  const auto loose = parse_agreement("Sure.\n{ \"B\" :  HIGH Priority ,\n A: low priority } done");
  ASSERT_TRUE(loose);
  EXPECT_EQ(loose->high, "B");
  EXPECT_EQ(loose->low, "A");
  EXPECT_FALSE(parse_agreement("{i: low priority, j: high priority}"));
  EXPECT_FALSE(parse_agreement("i: high priority, j: low priority"));
}

TEST(ApplyAssignment, TouchesOnlyThePair) {
  const std::map<RobotId, double> world{{"a", 1.0}, {"b", 2.0}, {"c", 0.1 + 0.2}};
  const PriorityAssignment as = with_new_priorities("a", "b", 1.0, 2.0);
  const auto once = apply_assignment(world, as);
  EXPECT_EQ(once.at("a"), 3.0);
  EXPECT_EQ(once.at("b"), 1.0);
  EXPECT_EQ(once.at("c"), world.at("c"));
  EXPECT_EQ(apply_assignment(once, as), once);
  EXPECT_THROW(apply_assignment(world, with_new_priorities("a", "z", 1.0, 2.0)), UnknownRobot);
}

TEST(Prompts, CarryMissionAndFormat) {
  const std::string system = negotiator_system_prompt(patient_robot(), "j", 3);
  EXPECT_THAT(system, ::testing::HasSubstr("City General Hospital"));
  EXPECT_THAT(system, ::testing::HasSubstr("3100.0 m"));
  EXPECT_THAT(system, ::testing::Not(::testing::HasSubstr("{{")));
  const std::string referee = referee_system_prompt({"i", "j"});
  EXPECT_THAT(referee, ::testing::HasSubstr("high priority"));
  EXPECT_THAT(referee, ::testing::Not(::testing::HasSubstr("{{")));
}

TEST(LlmNegotiate, HospitalDialogueReachesAgreement) {
  SessionRegistry registry;
  NegotiationSession session = registry.open(ventilator_robot(), patient_robot(), 3);
  MockChatService service;
  const PriorityAssignment out = llm_negotiate(session, ventilator_robot(), patient_robot(), service);
  EXPECT_EQ(out.high, "i");
  EXPECT_EQ(out.low, "j");
  EXPECT_GT(out.new_priorities.at("i"), out.new_priorities.at("j"));
  ASSERT_EQ(session.transcript.size(), 4u);
  EXPECT_EQ(session.transcript[0].speaker, "i");
  EXPECT_EQ(session.transcript[3].speaker, "j");
  EXPECT_EQ(session.transcript[3].text, testing::hospital_dialogue()[3]);
  EXPECT_FALSE(session.used_fallback);
  EXPECT_EQ(session.outcome, out);
}

TEST(LlmNegotiate, StopsAsSoonAsAMessageStatesTheAgreement) {
  NegotiationSession session;
  session.pair = {"i", "j"};
  MockClient client;
  EXPECT_CALL(client, complete(_)).WillOnce(Return("I go first. {i: high priority, j: low priority}"));
  const PriorityAssignment out = llm_negotiate(session, patient_robot(), ventilator_robot(), client);
  EXPECT_EQ(out.high, "i");
  EXPECT_EQ(session.transcript.size(), 1u);
}

TEST(LlmNegotiate, TimeoutFallsBackImmediately) {
  NegotiationSession session;
  session.pair = {"i", "j"};
  MockClient client;
  EXPECT_CALL(client, complete(_)).WillOnce(Throw(TransportError("timed out")));
  const PriorityAssignment out = llm_negotiate(session, patient_robot(), ventilator_robot(), client);
  EXPECT_EQ(out, scripted_negotiate(patient_robot(), ventilator_robot()));
  EXPECT_TRUE(session.used_fallback);
  EXPECT_TRUE(session.transcript.empty());
}

TEST(LlmNegotiate, NonConvergentFallsBackAfterMaxRounds) {
  NegotiationSession session;
  session.pair = {"i", "j"};
  session.max_rounds = 6;
  MockChatService service(MockMode::kNeverAgree);
  const PriorityAssignment out = llm_negotiate(session, patient_robot(), ventilator_robot(), service);
  EXPECT_EQ(out, scripted_negotiate(patient_robot(), ventilator_robot()));
  EXPECT_TRUE(session.used_fallback);
  EXPECT_EQ(session.transcript.size(), 12u);
  EXPECT_EQ(service.referee_requests(), 12);
}

TEST(LlmNegotiate, FailuresPropagateWithoutFallback) {
  NegotiationSession session;
  session.pair = {"i", "j"};
  session.max_rounds = 2;
  MockChatService never(MockMode::kNeverAgree);
  EXPECT_THROW(llm_negotiate(session, patient_robot(), ventilator_robot(), never, {.fallback = false}),
               MalformedReply);
  NegotiationSession other;
  other.pair = {"i", "j"};
  MockClient client;
  EXPECT_CALL(client, complete(_)).WillOnce(Throw(TransportError("down")));
  EXPECT_THROW(llm_negotiate(other, patient_robot(), ventilator_robot(), client, {.fallback = false}),
               TransportError);
}

TEST(LlmNegotiate, TranscriptNeverExceedsBudget) {
  for (int rounds = 1; rounds <= 5; ++rounds) {
    NegotiationSession session;
    session.pair = {"i", "j"};
    session.max_rounds = rounds;
    MockChatService service(MockMode::kNeverAgree);
    llm_negotiate(session, patient_robot(), ventilator_robot(), service);
    EXPECT_EQ(session.transcript.size(), static_cast<std::size_t>(2 * rounds));
  }
}

TEST(LlmNegotiate, RejectsForeignContexts) {
  NegotiationSession session;
  session.pair = {"a", "b"};
  MockChatService service;
  EXPECT_THROW(llm_negotiate(session, patient_robot(), ventilator_robot(), service), InvalidArgument);
}

TEST(HttpChatClient, HospitalDialogueOverHttp) {
  MockChatServer server(MockMode::kHospitalDialogue);
  ChatEndpoint endpoint;
  endpoint.url = server.url();
  endpoint.model = "mock-model";
  HttpChatClient client(endpoint, "secret");
  NegotiationSession session;
  session.pair = {"i", "j"};
  const PriorityAssignment out = llm_negotiate(session, patient_robot(), ventilator_robot(), client);
  EXPECT_EQ(out.high, "i");
  EXPECT_EQ(out.low, "j");
  EXPECT_EQ(session.transcript.size(), 4u);
  EXPECT_EQ(server.hits(), 8);
  EXPECT_EQ(server.authorization(), "Bearer secret");
  const auto body = nlohmann::json::parse(server.last_request());
  EXPECT_EQ(body.at("model"), "mock-model");
  EXPECT_EQ(body.at("messages").at(0).at("role"), "system");
}

TEST(HttpChatClient, TimeoutFallsBack) {
  MockChatServer server(MockMode::kStall, std::chrono::milliseconds(800));
  ChatEndpoint endpoint;
  endpoint.url = server.url();
  endpoint.timeout_ms = 100;
  endpoint.max_retries = 0;
  HttpChatClient client(endpoint, "");
  NegotiationSession session;
  session.pair = {"i", "j"};
  const auto start = std::chrono::steady_clock::now();
  const PriorityAssignment out = llm_negotiate(session, patient_robot(), ventilator_robot(), client);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(700));
  EXPECT_TRUE(session.used_fallback);
  EXPECT_TRUE(session.transcript.empty());
  EXPECT_EQ(out, scripted_negotiate(patient_robot(), ventilator_robot()));
}

TEST(HttpChatClient, RejectsBadUrlAndBody) {
  EXPECT_THROW(HttpChatClient(ChatEndpoint{.url = "ftp://x"}, ""), InvalidArgument);
  EXPECT_THROW(HttpChatClient::extract_content("not json"), TransportError);
  EXPECT_THROW(HttpChatClient::extract_content(R"({"choices": []})"), TransportError);
  EXPECT_EQ(HttpChatClient::extract_content(R"({"choices": [{"message": {"content": "ok"}}]})"), "ok");
}

}  // namespace
}  // namespace faca
