#include "doctest.h"
#include "oracles.hpp"
#include "protosec/closure.hpp"
#include "protosec/message_io.hpp"

using namespace protosec;

namespace {

const AgentId kA = AgentId::friend_(1);
const AgentId kB = AgentId::friend_(2);

MessageSet set_of(const char* text) { return parse_message_set(text); }

}  // namespace

TEST_SUITE("closure") {

TEST_CASE("parts examples") {
  CHECK(parts({}).empty());
  Message c = Message::crypt(KeyId(9), Message::nonce(1));
  Message p = Message::pair(Message::agent(kA), c);
  CHECK(parts({p}) == MessageSet{p, Message::agent(kA), c, Message::nonce(1)});
  Message h = Message::hash(Message::nonce(1));
  CHECK(parts({h}) == MessageSet{h});
}

TEST_CASE("analz examples") {
  Message c = Message::crypt(pub_key(kA), Message::nonce(1));
  CHECK(analz({c}) == MessageSet{c});
  Message k = Message::key(pri_key(kA));
  CHECK(analz({c, k}) == MessageSet{c, k, Message::nonce(1)});
  Message both = Message::pair(Message::key(shr_key(kB)),
                               Message::crypt(shr_key(kB), Message::nonce(7)));
  CHECK(analz({both}).contains(Message::nonce(7)));
  // A public key does not open what it encrypts.
  CHECK_FALSE(analz({c, Message::key(pub_key(kA))}).contains(Message::nonce(1)));
}

TEST_CASE("synth examples") {
  CHECK(synth_member(Message::agent(AgentId::spy()), {}));
  CHECK(synth_member(Message::number(42), {}));
  CHECK_FALSE(synth_member(Message::nonce(5), {}));
  Message x = Message::crypt(pub_key(kB), Message::pair(Message::nonce(1), Message::agent(kA)));
  CHECK(synth_member(x, {Message::nonce(1), Message::key(pub_key(kB))}));
  CHECK_FALSE(synth_member(x, {Message::nonce(1)}));
  CHECK(synth_member(x, {x}));
  CHECK(synth_member(Message::hash(Message::nonce(3)), {Message::nonce(3)}));
  CHECK_FALSE(synth_member(Message::nonce(3), {Message::hash(Message::nonce(3))}));
}

TEST_CASE("pparts and kparts examples") {
  CHECK(pparts({Message::nonce(1)}).empty());
  Message a = Message::nonce(1), b = Message::nonce(2), c = Message::nonce(3);
  Message ab = Message::pair(a, b);
  CHECK(pparts({Message::pair(ab, c)}) == MessageSet{Message::pair(ab, c), ab});
  CHECK(pparts({Message::crypt(KeyId(1), ab)}).empty());
  CHECK(kparts({Message::nonce(1)}) == MessageSet{Message::nonce(1)});
  Message cr = Message::crypt(KeyId(4), b);
  CHECK(kparts({Message::pair(a, Message::pair(Message::agent(kA), cr))}) ==
        MessageSet{a, Message::agent(kA), cr});
  CHECK(kparts({}).empty());
}

TEST_CASE("crypt measure") {
  CHECK(crypt_measure({}) == 0);
  Message inner = Message::crypt(KeyId(2), Message::nonce(2));
  CHECK(crypt_measure({Message::crypt(KeyId(1), inner), Message::nonce(1)}) == 1);
  CHECK(crypt_measure({inner, Message::crypt(KeyId(3), Message::nonce(2))}) == 2);
}

TEST_CASE("incremental closure equals analz") {
  oracle::Universe u;
  for (const auto& h : u.sets(600, 11)) {
    AnalzClosure inc;
    for (const auto& m : h) inc.add(m);
    CHECK(inc.known() == analz(h));
    // Reverse insertion order.
    AnalzClosure rev;
    auto v = h.to_vector();
    for (auto it = v.rbegin(); it != v.rend(); ++it) rev.add(*it);
    CHECK(rev.known() == analz(h));
  }
}

TEST_CASE("agreement with the naive closure oracle") {
  oracle::Universe u;
  std::size_t mismatches = 0;
  for (const auto& h : u.sets(1500, 3)) {
    auto hs = oracle::to_set(h);
    if (oracle::from_set(oracle::parts(hs)) != parts(h)) ++mismatches;
    if (oracle::from_set(oracle::analz(hs)) != analz(h)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("synth agrees with the bottom-up oracle") {
  oracle::Universe u;
  auto terms = u.terms(100, 5);
  auto sets = u.sets(60, 8);
  for (const auto& h : sets) {
    MessageSet ah = analz(h);
    auto ahs = oracle::to_set(ah);
    for (const auto& x : terms) REQUIRE(synth_member(x, ah) == oracle::synth_member(x, ahs));
  }
}

TEST_CASE("closure laws") {
  oracle::Universe u;
  auto sets = u.sets(400, 21);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& h = sets[i];
    MessageSet p = parts(h), a = analz(h);
    CHECK(parts(p) == p);
    CHECK(analz(a) == a);
    CHECK(h.is_subset_of(a));
    CHECK(a.is_subset_of(p));
    CHECK(analz(h) == pparts(h).united(analz(kparts(h))));
    const auto& g = sets[(i * 7 + 3) % sets.size()];
    MessageSet hg = h.united(g);
    CHECK(p.is_subset_of(parts(hg)));
    CHECK(a.is_subset_of(analz(hg)));
  }
}

TEST_CASE("synth is monotone") {
  oracle::Universe u;
  auto terms = u.terms(50, 2);
  auto sets = u.sets(40, 9);
  for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
    MessageSet small = analz(sets[i]);
    MessageSet big = analz(sets[i].united(sets[i + 1]));
    for (const auto& x : terms)
      if (synth_member(x, small)) REQUIRE(synth_member(x, big));
  }
}

TEST_CASE("parsed fixtures") {
  MessageSet h = set_of("{Crypt(pubK(Friend 1)){Nonce 1}, Key priK(Friend 1)}");
  CHECK(analz(h).contains(Message::nonce(1)));
}

}
