#include <gtest/gtest.h>

#include <fstream>

#include "helpers.hpp"
#include "xlr/error.hpp"
#include "xlr/llm/cache.hpp"
#include "xlr/llm/client.hpp"
#include "xlr/llm/extract.hpp"
#include "xlr/llm/structured.hpp"
#include "xlr/llm/template.hpp"
#include "xlr/llm/transports.hpp"

namespace xlr::llm {
namespace {

using testing::MockClient;

TemplateStore store() {
  TemplateStore t;
  t.add(PromptTemplate("greet", "Hello {name}, fix {code}. JSON: {\"k\": 1}"));
  return t;
}

CompletionRequest greet(std::uint32_t sample = 0) {
  CompletionRequest r;
  r.template_id = "greet";
  r.bindings = {{"name", "x"}, {"code", "y"}};
  r.sample_index = sample;
  return r;
}

class FakeTransport : public Transport {
 public:
  std::vector<std::function<std::string()>> script;
  int calls = 0;
  std::string last_prompt;
  std::string send(const CompletionRequest&, const std::string& prompt) override {
    last_prompt = prompt;
    return script.at(static_cast<std::size_t>(calls++))();
  }
};

RetryPolicy no_sleep() {
  RetryPolicy p;
  p.sleep = [](std::chrono::milliseconds) {};
  return p;
}

TEST(Template, RendersAndLeavesOtherBracesAlone) {
  EXPECT_EQ(store().render("greet", {{"name", "a"}, {"code", "{b}"}}), "Hello a, fix {b}. JSON: {\"k\": 1}");
}

TEST(Template, UnboundPlaceholderIsAnError) {
  try {
    store().render("greet", {{"name", "a"}});
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("code"), std::string::npos);
  }
}

TEST(Template, HashChangesWithBody) {
  auto a = store();
  auto b = store();
  EXPECT_EQ(a.hash(), b.hash());
  b.add(PromptTemplate("greet", "Hi {name} {code}"));
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Fingerprint, IncludesSampleIndexAndIsStable) {
  EXPECT_EQ(fingerprint(greet(0)), fingerprint(greet(0)));
  EXPECT_NE(fingerprint(greet(0)), fingerprint(greet(1)));
  auto r = greet();
  r.temperature = 0.5;
  EXPECT_NE(fingerprint(r), fingerprint(greet()));
  EXPECT_EQ(request_from_json(to_json(r)), r);
}

TEST(CachingClient, ReplayHitAndMiss) {
  auto t = store();
  ReplayCache cache;
  cache.put(greet(0), "recorded");
  CachingClient client(t, cache, Mode::kReplay);
  EXPECT_EQ(client.complete(greet(0)), "recorded");
  try {
    client.complete(greet(1));
    FAIL();
  } catch (const ReplayMissError& e) {
    EXPECT_EQ(e.fingerprint(), fingerprint(greet(1)));
    EXPECT_NE(std::string(e.what()).find(e.fingerprint()), std::string::npos);
  }
}

TEST(CachingClient, SampleIndicesAreDistinctEntries) {
  auto t = store();
  ReplayCache cache;
  FakeTransport tr;
  tr.script = {[] { return std::string("zero"); }, [] { return std::string("one"); }};
  CachingClient client(t, cache, Mode::kRecord, &tr, no_sleep());
  EXPECT_EQ(client.complete(greet(0)), "zero");
  EXPECT_EQ(client.complete(greet(1)), "one");
  EXPECT_EQ(client.complete(greet(0)), "zero");
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_EQ(tr.calls, 2);
  EXPECT_EQ(tr.last_prompt, "Hello x, fix y. JSON: {\"k\": 1}");
}

TEST(CachingClient, RetriesTransientErrorsWithBackoff) {
  auto t = store();
  ReplayCache cache;
  FakeTransport tr;
  tr.script = {[]() -> std::string { throw TransportError("503", true); },
               []() -> std::string { throw TransportError("429", true); }, [] { return std::string("ok"); }};
  std::vector<long> waits;
  RetryPolicy p;
  p.initial_backoff = std::chrono::milliseconds(100);
  p.sleep = [&](std::chrono::milliseconds d) { waits.push_back(d.count()); };
  CachingClient client(t, cache, Mode::kRecord, &tr, p);
  EXPECT_EQ(client.complete(greet()), "ok");
  EXPECT_EQ(waits, (std::vector<long>{100, 200}));
}

TEST(CachingClient, GivesUpAfterBudgetAndOnPermanentErrors) {
  auto t = store();
  ReplayCache cache;
  FakeTransport tr;
  for (int i = 0; i < 4; ++i) tr.script.push_back([]() -> std::string { throw TransportError("503", true); });
  CachingClient client(t, cache, Mode::kRecord, &tr, no_sleep());
  EXPECT_THROW(client.complete(greet()), TransportError);
  EXPECT_EQ(tr.calls, 4);
  EXPECT_EQ(cache.size(), 0u);

  FakeTransport perm;
  perm.script = {[]() -> std::string { throw TransportError("401", false); }};
  CachingClient client2(t, cache, Mode::kRecord, &perm, no_sleep());
  EXPECT_THROW(client2.complete(greet()), TransportError);
  EXPECT_EQ(perm.calls, 1);
}

TEST(ReplayCache, FileRoundTripAndTamperDetection) {
  const auto dir = testing::scratch_root() / "cache";
  std::filesystem::create_directories(dir);
  const auto path = dir / "c.jsonl";
  std::filesystem::remove(path);
  {
    ReplayCache c(path);
    c.put(greet(0), "a\nb");
    c.put(greet(3), "```x```");
  }
  {
    ReplayCache c(path);
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(c.find(greet(0)), "a\nb");
    EXPECT_EQ(c.find(greet(3)), "```x```");
    EXPECT_FALSE(c.find(greet(1)));
  }
  // A stored request edited without updating its fingerprint is rejected.
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  auto j = nlohmann::json::parse(first);
  j["request"]["sample_index"] = 9;
  std::ofstream(path, std::ios::trunc) << j.dump() << '\n';
  EXPECT_THROW(ReplayCache{path}, ParseError);
  std::filesystem::remove_all(dir);
}

TEST(Extract, LastCodeBlockWins) {
  const std::string reply = "Intro\n```cpp\nint a;\n```\nthen\n```rust\nfn main() {}\n```\nbye";
  EXPECT_EQ(last_code_block(reply), "fn main() {}\n");
  EXPECT_FALSE(last_code_block("no code here"));
}

TEST(Extract, LastStructuredBlock) {
  const std::string reply = "```json\n{\"a\": 1}\n```\n```json\nnot json\n```\n```\n{\"b\": 2}\n```";
  auto j = last_structured_block(reply);
  ASSERT_TRUE(j);
  EXPECT_EQ((*j)["a"], 1);
  EXPECT_FALSE(last_structured_block("```\nplain\n```"));
}

TEST(Structured, RetriesUntilParseable) {
  int n = 0;
  MockClient client([&](const CompletionRequest&) {
    return ++n < 3 ? std::string("garbled") : testing::json_reply({{"v", 7}});
  });
  auto v = request_structured<int>(client, greet(), 2, [](const nlohmann::json& j) -> std::optional<int> {
    if (!j.contains("v")) return std::nullopt;
    return j["v"].get<int>();
  });
  ASSERT_TRUE(v);
  EXPECT_EQ(*v, 7);
  auto reqs = client.requests();
  ASSERT_EQ(reqs.size(), 3u);
  EXPECT_EQ(reqs[0].sample_index, 0u);
  EXPECT_EQ(reqs[2].sample_index, 2u);
}

TEST(RateLimiter, CapsRequestsInFlight) {
  RateLimiter limiter(2, 1e9);
  std::atomic<int> peak{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      auto permit = limiter.acquire();
      int now = limiter.in_flight();
      int prev = peak.load();
      while (now > prev && !peak.compare_exchange_weak(prev, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(peak.load(), 2);
  EXPECT_EQ(limiter.in_flight(), 0);
}

TEST(ScriptedTransport, FirstMatchingEntryWins) {
  const auto dir = testing::scratch_root() / "scripted";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "r.txt") << "from file";
  nlohmann::json t = {{"entries",
                       {{{"template", "greet"}, {"contains", "fix z"}, {"reply", "z"}},
                        {{"template", "greet"}, {"sample_index", 2}, {"reply_file", "r.txt"}},
                        {{"template", "greet"}, {"reply", "any"}}}}};
  std::ofstream(dir / "t.json") << t.dump();
  ScriptedTransport tr(dir / "t.json");
  EXPECT_EQ(tr.send(greet(0), "Hello, fix z"), "z");
  EXPECT_EQ(tr.send(greet(2), "Hello"), "from file");
  EXPECT_EQ(tr.send(greet(1), "Hello"), "any");
  auto other = greet();
  other.template_id = "other";
  EXPECT_THROW(tr.send(other, ""), TransportError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace xlr::llm
