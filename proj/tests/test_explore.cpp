#include <functional>

#include "corpus_path.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "protosec/closure.hpp"
#include "protosec/explore.hpp"

using namespace protosec;

namespace {

const AgentId kA = AgentId::friend_(1);
const AgentId kB = AgentId::friend_(2);

class Collect : public Visitor {
 public:
  explicit Collect(std::function<void(const ExplorationState&)> f) : f_(std::move(f)) {}
  bool on_state(const ExplorationState& st) override {
    f_(st);
    return true;
  }

 private:
  std::function<void(const ExplorationState&)> f_;
};

ExplorationBounds nsl_bounds(std::size_t len) {
  auto f = corpus("nsl.proto");
  return ExplorationBounds::for_protocol(f.protocol, len, 3, 1);
}

}  // namespace

TEST_SUITE("explore") {

TEST_CASE("honest NSL run is reachable") {
  auto p = corpus("nsl.proto").protocol;
  bool found = false;
  Collect v([&](const ExplorationState& st) {
    const auto& s = st.steps();
    if (s.size() == 3 && s[0].rule == "NS1" && s[1].rule == "NS2" && s[2].rule == "NS3" &&
        s[0].event.sender == kA && s[0].event.recipient == kB && s[2].event.sender == kA)
      found = true;
  });
  auto b = nsl_bounds(3);
  b.max_fakes = 0;
  explore(p, b, v);
  CHECK(found);
}

TEST_CASE("length bound zero") {
  auto p = corpus("nsl.proto").protocol;
  std::size_t n = 0;
  Collect v([&](const ExplorationState& st) {
    CHECK(st.size() == 0);
    ++n;
  });
  auto r = explore(p, nsl_bounds(0), v);
  CHECK(n == 1);
  CHECK(r.states == 1);
}

TEST_CASE("empty pools are rejected") {
  auto p = corpus("nsl.proto").protocol;
  ExplorationBounds b = nsl_bounds(3);
  b.nonce_pool.clear();
  Visitor v;
  CHECK_THROWS_AS(explore(p, b, v), BoundsTooSmall);
}

TEST_CASE("enabled instances of NS1 by direct enumeration") {
  auto p = corpus("nsl.proto").protocol;
  const Rule& ns1 = p.rule("NS1");
  ExplorationBounds b;
  b.agent_pool = {kA, kB};
  b.nonce_pool = {0, 1};
  b.canonical_fresh = false;
  auto got = enabled_instances(Trace{}, ns1, b, p);
  std::size_t expected = 0;
  for (auto a : b.agent_pool)
    for (auto c : b.agent_pool)
      for (auto n : b.nonce_pool) {
        Substitution s;
        s.bind("A", Message::agent(a));
        s.bind("B", Message::agent(c));
        s.bind("NA", Message::nonce(n));
        if (ok({}, ns1, s, p)) ++expected;
      }
  CHECK(expected == 4);
  CHECK(got.size() == expected);
  for (const auto& s : got) CHECK(ok({}, ns1, s, p));

  // NS2 has no instance without a first message.
  CHECK(enabled_instances(Trace{}, p.rule("NS2"), b, p).empty());
}

TEST_CASE("OR2 binds the ticket by matching") {
  auto p = corpus("otway-rees.proto").protocol;
  auto b = ExplorationBounds::for_protocol(p, 4, 4, 1);
  auto or1 = enabled_instances(Trace{}, p.rule("OR1"), b, p);
  REQUIRE_FALSE(or1.empty());
  Trace t{p.rule("OR1").post().instantiate(or1.front())};
  auto or2 = enabled_instances(t, p.rule("OR2"), b, p);
  REQUIRE_FALSE(or2.empty());
  for (const auto& s : or2) CHECK(s.contains("X"));
}

TEST_CASE("explored traces replay") {
  auto p = corpus("nsl.proto").protocol;
  std::size_t n = 0;
  Collect v([&](const ExplorationState& st) {
    ++n;
    auto err = replay_error(p, st.steps());
    if (err) FAIL_CHECK(*err);
    // Nonces introduced as new are unused just before.
    for (std::size_t i = 0; i < st.steps().size(); ++i) {
      const Step& s = st.steps()[i];
      if (s.is_fake()) continue;
      Trace prefix = trace_of({st.steps().begin(), st.steps().begin() + static_cast<std::ptrdiff_t>(i)});
      MessageSet u = used(prefix, p);
      for (const auto& var : p.rule(s.rule).newn()) CHECK_FALSE(u.contains(s.subst.at(var)));
    }
    // The incremental spy knowledge matches a recomputation.
    CHECK(st.analz().known() == analz(spies(st.trace(), p)));
  });
  explore(p, nsl_bounds(4), v);
  CHECK(n > 100);
}

TEST_CASE("replay rejects forged steps") {
  auto p = corpus("nsl.proto").protocol;
  Message secret_body = Message::crypt(pub_key(kB), Message::pair(Message::nonce(3), Message::agent(kA)));
  std::vector<Step> fake{{says(AgentId::spy(), kB, secret_body), "", {}}};
  CHECK(replay_error(p, fake).has_value());
  Substitution s;
  s.bind("A", Message::agent(kA));
  s.bind("B", Message::agent(kB));
  s.bind("NA", Message::nonce(3));
  std::vector<Step> honest{{says(kA, kB, secret_body), "NS1", s}};
  CHECK_FALSE(replay_error(p, honest).has_value());
  std::vector<Step> twice{honest[0], honest[0]};
  CHECK(replay_error(p, twice).has_value());
}

TEST_CASE("fake messages are synthesizable") {
  auto p = corpus("nsl.proto").protocol;
  auto b = nsl_bounds(3);
  std::size_t checked = 0;
  Collect v([&](const ExplorationState& st) {
    MessageSet a = st.analz().known();
    for (const auto& m : fake_messages(st, p, b)) {
      REQUIRE(synth_member(m, a));
      REQUIRE(oracle::synth_member(m, oracle::to_set(a)));
      ++checked;
    }
  });
  explore(p, b, v);
  CHECK(checked > 0);
}

TEST_CASE("fakes use only deducible nonces") {
  auto p = corpus("nsl.proto").protocol;
  auto b = nsl_bounds(3);
  ExplorationState st(p);
  for (const auto& m : fake_messages(st, p, b)) {
    MessageSet pm = parts({m});
    for (const auto& x : pm) CHECK(x.kind() != Message::Kind::kNonce);
  }
  // Once the spy learns a nonce, fakes of the first message carry it. No rule
  // reads an NS3 message, so none is faked.
  Message leaked = Message::crypt(pub_key(AgentId::spy()),
                                  Message::pair(Message::nonce(5), Message::agent(kA)));
  Substitution s;
  s.bind("A", Message::agent(kA));
  s.bind("B", Message::agent(AgentId::spy()));
  s.bind("NA", Message::nonce(5));
  st.apply({says(kA, AgentId::spy(), leaked), "NS1", s});
  MessageSet fakes = fake_messages(st, p, b);
  CHECK(fakes.contains(Message::crypt(pub_key(kB), Message::pair(Message::nonce(5), Message::agent(kA)))));
  CHECK_FALSE(fakes.contains(Message::crypt(pub_key(kB), Message::nonce(5))));
}

TEST_CASE("NSL authentication at the bound") {
  auto p = corpus("nsl.proto").protocol;
  std::size_t runs = 0;
  Collect v([&](const ExplorationState& st) {
    for (const auto& s3 : st.steps()) {
      if (s3.rule != "NS3") continue;
      AgentId a = s3.subst.at("A").agent_id(), b = s3.subst.at("B").agent_id();
      if (p.is_bad(a) || p.is_bad(b)) continue;
      Message nb = s3.subst.at("NB");
      Message na = s3.subst.at("NA");
      bool ns2 = false;
      for (const auto& s2 : st.steps())
        if (s2.rule == "NS2" && s2.event.sender == b && s2.subst.at("NB") == nb) ns2 = true;
      if (!ns2) continue;
      ++runs;
      Event ns1 = says(a, b, Message::crypt(pub_key(b), Message::pair(na, Message::agent(a))));
      CHECK(st.has_event(ns1));
    }
  });
  explore(p, nsl_bounds(5), v);
  CHECK(runs > 0);
}

TEST_CASE("exploration is deterministic") {
  auto p = corpus("ns-original.proto").protocol;
  auto run = [&] {
    std::string out;
    Collect v([&](const ExplorationState& st) {
      for (const auto& s : st.steps()) out += s.str() + ";";
      out += "\n";
    });
    auto r = explore(p, nsl_bounds(4), v);
    out += std::to_string(r.states) + " " + std::to_string(r.transitions);
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("state budget truncates") {
  auto p = corpus("nsl.proto").protocol;
  auto b = nsl_bounds(5);
  b.max_states = 50;
  Visitor v;
  auto r = explore(p, b, v);
  CHECK(r.truncated);
  CHECK(r.states <= 50);
}

}
