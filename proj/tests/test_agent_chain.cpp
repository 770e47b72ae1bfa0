#include "corpus_path.hpp"
#include "doctest.h"
#include "protosec/agent_chain.hpp"
#include "protosec/closure.hpp"
#include "protosec/explore.hpp"

using namespace protosec;
using namespace protosec::msglist;

namespace {

const AgentId kA = AgentId::friend_(1);
const AgentId kB = AgentId::friend_(2);
const AgentId kC = AgentId::friend_(3);
constexpr ChainVariant kBoth[] = {ChainVariant::kP1, ChainVariant::kP2};

}  // namespace

TEST_SUITE("agent_chain") {

TEST_CASE("sign") {
  Message s = sign(kA, Message::nonce(3));
  CHECK(s == Message::pair(Message::agent(kA),
                           Message::pair(Message::nonce(3),
                                         Message::crypt(pri_key(kA), Message::hash(Message::nonce(3))))));
  CHECK(verify_signature(s));
  auto parts_of = signature_parts(s);
  REQUIRE(parts_of);
  CHECK(parts_of->first == kA);
  Message tampered = Message::pair(Message::agent(kA),
                                   Message::pair(Message::nonce(4), s.second().second()));
  CHECK_FALSE(verify_signature(tampered));
  Message wrong_key = Message::pair(Message::agent(kB), s.second());
  CHECK_FALSE(verify_signature(wrong_key));
}

TEST_CASE("chain shapes") {
  Message m = Message::nonce(8);
  Message l = cons(m, nil());
  Message p1 = chain(ChainVariant::kP1, kB, 4, kA, l, kC);
  CHECK(p1 == sign(kB, Message::pair(Message::crypt(pub_key(kA), Message::nonce(4)),
                                     Message::hash(Message::pair(m, Message::agent(kC))))));
  Message p2 = chain(ChainVariant::kP2, kB, 4, kA, l, kC);
  CHECK(p2 == Message::pair(Message::crypt(pub_key(kA), sign(kB, Message::nonce(4))),
                            Message::hash(Message::pair(m, Message::agent(kC)))));
  for (auto v : kBoth)
    CHECK(anchor(v, kA, 9, kB) == chain(v, kA, 9, kA, cons(nil(), nil()), kB));
}

TEST_CASE("P2 hides the shop") {
  Message p2 = chain(ChainVariant::kP2, kB, 4, kA, cons(Message::nonce(1), nil()), kC);
  CHECK(visible_agents(p2, kA).count(kB) == 0);
  Message p1 = chain(ChainVariant::kP1, kB, 4, kA, cons(Message::nonce(1), nil()), kC);
  CHECK(visible_agents(p1, kA).count(kB) == 1);
  // Agent B still occurs, but only under the owner's public key.
  CHECK(parts({p2}).contains(Message::agent(kB)));

  std::vector<AgentId> agents{kB, kC, AgentId::spy()};
  for (const auto& l : valid_chains(ChainVariant::kP2, kA, 5, kB, agents, {6, 7}, 4))
    for (const auto& m : to_vector(l)) {
      AgentId s = shop(m, ChainVariant::kP2, true);
      if (s != kA) CHECK(visible_agents(m, kA).count(s) == 0);
    }
}

TEST_CASE("request and proposal messages") {
  Message i = from_vector({Message::agent(kC)});
  for (auto v : kBoth) {
    Message r = reqm(v, kA, 2, 5, i, kB);
    CHECK(r == Message::tuple({Message::agent(kA), Message::number(2),
                               cons(Message::agent(kA), cons(Message::agent(kB), i)),
                               cons(anchor(v, kA, 5, kB), nil())}));
    Message l = cons(anchor(v, kA, 5, kB), nil());
    Message it = from_vector({Message::agent(kB), Message::agent(kC)});
    Message j = from_vector({Message::agent(kA)});
    Message p = prom(v, kB, 6, kA, 2, it, l, j, kC);
    CHECK(p == Message::tuple({Message::agent(kA), Message::number(2),
                               app(j, del(Message::agent(kB), it)),
                               cons(chain(v, kB, 6, kA, l, kC), l)}));
    CHECK(len(p.second().second().second()) == len(l) + 1);
  }
}

TEST_CASE("shop and next shop") {
  Message l = cons(anchor(ChainVariant::kP1, kA, 5, kB), nil());
  Message c1 = chain(ChainVariant::kP1, kB, 6, kA, l, kC);
  CHECK(shop(c1, ChainVariant::kP1, false) == kB);
  CHECK(next_shop(c1, ChainVariant::kP1) == kC);
  Message l2 = cons(anchor(ChainVariant::kP2, kA, 5, kB), nil());
  Message c2 = chain(ChainVariant::kP2, kB, 6, kA, l2, kC);
  CHECK(shop(c2, ChainVariant::kP2, true) == kB);
  CHECK_THROWS_AS(shop(c2, ChainVariant::kP2, false), OwnerKeyRequired);
  CHECK(next_shop(c2, ChainVariant::kP2) == kC);
  CHECK_THROWS_AS(shop(Message::nonce(1), ChainVariant::kP1, false), NotAChain);
  auto f = chain_fields(c1, ChainVariant::kP1, false);
  CHECK(f.ofr == 6);
  CHECK(f.owner == kA);
  CHECK(f.previous == head(l));
}

TEST_CASE("validity") {
  for (auto v : kBoth) {
    Message l = cons(anchor(v, kA, 5, kB), nil());
    CHECK(valid_member(l, kA, 5, kB, v, true));
    CHECK_FALSE(valid_member(l, kA, 6, kB, v, true));
    Message l1 = cons(chain(v, kB, 6, kA, l, kC), l);
    Message l2 = cons(chain(v, kC, 7, kA, l1, kB), l1);
    Message l3 = cons(chain(v, kB, 8, kA, l2, kA), l2);
    CHECK(valid_member(l3, kA, 5, kB, v, true));
    // Wrong signer: C was not the committed next shop of l.
    CHECK_FALSE(valid_member(cons(chain(v, kC, 6, kA, l, kC), l), kA, 5, kB, v, true));
    // Middle offer replaced.
    Message forged = repl(l3, 1, chain(v, kC, 9, kA, l1, kB));
    auto r = check_valid(forged, kA, 5, kB, v, true);
    CHECK_FALSE(r.valid);
    CHECK(r.failing_position.has_value());
    CHECK_THROWS_AS(check_valid(Message::nonce(1), kA, 5, kB, v, true), MalformedList);
  }
  Message l = cons(anchor(ChainVariant::kP1, kA, 5, kB), nil());
  CHECK(valid_member(l, kA, 5, kB, ChainVariant::kP1, false));
  Message l2 = cons(anchor(ChainVariant::kP2, kA, 5, kB), nil());
  CHECK_THROWS_AS(valid_member(l2, kA, 5, kB, ChainVariant::kP2, false), OwnerKeyRequired);
}

TEST_CASE("valid chains are valid") {
  std::vector<AgentId> agents{kB, kC, AgentId::spy()};
  for (auto v : kBoth) {
    auto all = valid_chains(v, kA, 5, kB, agents, {6, 7}, 3);
    CHECK(all.size() == 1 + 6 + 36);
    for (const auto& l : all) CHECK(valid_member(l, kA, 5, kB, v, true));
  }
}

TEST_CASE("small resilience sweep") {
  std::vector<AgentId> agents{kB, kC, AgentId::spy()};
  for (auto v : kBoth) {
    for (const auto& l : valid_chains(v, kA, 5, kB, agents, {6}, 3)) {
      auto universe = mutation_universe(l, v, kA, agents, {6});
      std::size_t n = len(l);
      for (std::size_t i = 1; i < n; ++i) {
        for (const auto& m : universe) {
          if (m != ith(l, i)) CHECK_FALSE(valid_member(repl(l, i, m), kA, 5, kB, v, true));
          CHECK_FALSE(valid_member(ins(l, i, m), kA, 5, kB, v, true));
        }
      }
      for (std::size_t i = 0; i + 1 < n; ++i)
        for (const auto& m : universe) {
          Message t = cons(m, trunc(l, i + 1));
          if (valid_member(t, kA, 5, kB, v, true))
            CHECK(shop(m, v, true) == shop(ith(l, i), v, true));
        }
    }
  }
}

TEST_CASE("dump format") {
  Message l = cons(anchor(ChainVariant::kP2, kA, 5, kB), nil());
  std::string hidden = dump_chain(l, kA, 5, kB, ChainVariant::kP2, false);
  CHECK(hidden.find("0 <hidden> ") == 0);
  CHECK(hidden.find("verdict: owner key required") != std::string::npos);
  std::string shown = dump_chain(l, kA, 5, kB, ChainVariant::kP2, true);
  CHECK(shown.find("0 Friend 1 ") == 0);
  CHECK(shown.find("verdict: valid") != std::string::npos);
}

TEST_CASE("variant names") {
  CHECK(parse_variant("P1") == ChainVariant::kP1);
  CHECK(parse_variant("p2") == ChainVariant::kP2);
  CHECK_THROWS_AS(parse_variant("p3"), Error);
  CHECK(variant_name(ChainVariant::kP2) == "p2");
}

TEST_CASE("rules of the protocols") {
  std::vector<AgentId> agents{kA, kB, kC, AgentId::spy()};
  for (auto v : kBoth) {
    Protocol p = p_protocol(v, agents);
    CHECK(p.rule("Req").newn() == std::set<std::string>{"n"});
    CHECK(p.rule("Prop").newn() == std::set<std::string>{"ofr"});
    // The corpus files use the same message shapes, with extra side
    // conditions fixing the scenario.
    auto f = corpus(v == ChainVariant::kP1 ? "p1.proto" : "p2.proto");
    for (const char* r : {"Req", "Prop"}) {
      CHECK(f.protocol.rule(r).post() == p.rule(r).post());
      CHECK(f.protocol.rule(r).pres() == p.rule(r).pres());
    }
    CHECK(f.protocol.rule("Prop").wheres().front() == p.rule("Prop").wheres().front());
  }
}

TEST_CASE("protocol steps") {
  std::vector<AgentId> agents{kA, kB, kC, AgentId::spy()};
  Protocol p = p_protocol(ChainVariant::kP1, agents);
  const Rule& req = p.rule("Req");
  const Rule& prop = p.rule("Prop");
  Substitution s;
  s.bind("A", Message::agent(kA));
  s.bind("B", Message::agent(kB));
  s.bind("r", Message::number(0));
  s.bind("n", Message::nonce(1));
  s.bind("I", nil());
  CHECK(ok({}, req, s, p));
  Event e = req.post().instantiate(s);
  CHECK(e.body == reqm(ChainVariant::kP1, kA, 0, 1, nil(), kB));
  CHECK_FALSE(ok({e}, req, s, p));  // n is used now

  Substitution t;
  t.bind("A'", Message::agent(kA));
  t.bind("A", Message::agent(kA));
  t.bind("B", Message::agent(kB));
  t.bind("r", Message::number(0));
  t.bind("I", from_vector({Message::agent(kA), Message::agent(kB)}));
  t.bind("L", cons(anchor(ChainVariant::kP1, kA, 1, kB), nil()));
  t.bind("J", from_vector({Message::agent(kC)}));
  t.bind("ofr", Message::nonce(2));
  Substitution to_c = t, to_spy = t;
  to_c.bind("C", Message::agent(kC));
  to_spy.bind("C", Message::agent(AgentId::spy()));
  CHECK(ok({e}, prop, to_c, p));
  CHECK_FALSE(ok({e}, prop, to_spy, p));  // Spy is not on the itinerary
}

TEST_CASE("honest two-shop run is reachable") {
  auto f = corpus("p1.proto");
  auto b = f.exploration_bounds();
  b.max_trace_len = 3;
  b.max_fakes = 0;
  class Find : public Visitor {
   public:
    bool found = false;
    bool on_state(const ExplorationState& st) override {
      const auto& s = st.steps();
      if (s.size() == 3 && s[0].rule == "Req" && s[1].rule == "Prop" && s[2].rule == "Prop") {
        const Message& offers = s[2].event.body.second().second().second();
        if (valid_member(offers, kA, s[0].subst.at("n").value(), s[0].event.recipient,
                         ChainVariant::kP1, false))
          found = true;
      }
      return !found;
    }
  } v;
  explore(f.protocol, b, v);
  CHECK(v.found);
}

}
