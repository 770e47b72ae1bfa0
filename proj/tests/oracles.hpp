#ifndef PROTOSEC_TESTS_ORACLES_HPP_
#define PROTOSEC_TESTS_ORACLES_HPP_

// Reference implementations used only by the tests. They follow the inductive
// definitions literally: apply every rule to every member until nothing new
// appears. Slow on purpose; they share no code with the library beyond the
// Message type.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "protosec/message.hpp"

namespace oracle {

using protosec::KeyId;
using protosec::Message;
using MsgSet = std::set<Message>;

inline MsgSet to_set(const protosec::MessageSet& h) { return {h.begin(), h.end()}; }
inline protosec::MessageSet from_set(const MsgSet& s) { return {s.begin(), s.end()}; }

// Inj, Fst, Snd, Body.
inline MsgSet parts(const MsgSet& h) {
  MsgSet cur = h;
  for (bool changed = true; changed;) {
    changed = false;
    MsgSet next = cur;
    for (const auto& m : cur) {
      if (m.kind() == Message::Kind::kPair) {
        next.insert(m.first());
        next.insert(m.second());
      } else if (m.kind() == Message::Kind::kCrypt) {
        next.insert(m.body());
      }
    }
    if (next.size() != cur.size()) {
      cur = std::move(next);
      changed = true;
    }
  }
  return cur;
}

// Inj, Fst, Snd, Decrypt.
inline MsgSet analz(const MsgSet& h) {
  MsgSet cur = h;
  for (bool changed = true; changed;) {
    changed = false;
    MsgSet next = cur;
    for (const auto& m : cur) {
      if (m.kind() == Message::Kind::kPair) {
        next.insert(m.first());
        next.insert(m.second());
      } else if (m.kind() == Message::Kind::kCrypt) {
        for (const auto& k : cur)
          if (k.kind() == Message::Kind::kKey && k.key_id() == protosec::inv_key(m.key_id()))
            next.insert(m.body());
      }
    }
    if (next.size() != cur.size()) {
      cur = std::move(next);
      changed = true;
    }
  }
  return cur;
}

inline void subterms(const Message& m, MsgSet& out) {
  if (!out.insert(m).second) return;
  switch (m.kind()) {
    case Message::Kind::kHash:
    case Message::Kind::kCrypt:
      subterms(m.body(), out);
      break;
    case Message::Kind::kPair:
      subterms(m.first(), out);
      subterms(m.second(), out);
      break;
    default:
      break;
  }
}

// x in synth H, by saturating the synthesizable subterms of x bottom-up.
inline bool synth_member(const Message& x, const MsgSet& h) {
  MsgSet subs;
  subterms(x, subs);
  MsgSet got;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& m : subs) {
      if (got.count(m)) continue;
      bool ok = h.count(m) != 0;
      switch (m.kind()) {
        case Message::Kind::kAgent:
        case Message::Kind::kNumber:
          ok = true;
          break;
        case Message::Kind::kHash:
          ok = ok || got.count(m.body());
          break;
        case Message::Kind::kPair:
          ok = ok || (got.count(m.first()) && got.count(m.second()));
          break;
        case Message::Kind::kCrypt:
          ok = ok || (got.count(m.body()) && h.count(Message::key(m.key_id())));
          break;
        default:
          break;
      }
      if (ok) {
        got.insert(m);
        changed = true;
      }
    }
  }
  return got.count(x) != 0;
}

// Every path from the root of x to an occurrence of the secret that does not
// enter a Hash passes a Crypt K with invKey K in ks.
inline bool guarded(const Message& secret, const std::set<KeyId>& ks, const Message& x,
                    bool covered = false) {
  if (x == secret) return covered;
  switch (x.kind()) {
    case Message::Kind::kCrypt:
      return guarded(secret, ks, x.body(),
                     covered || ks.count(protosec::inv_key(x.key_id())) != 0);
    case Message::Kind::kPair:
      return guarded(secret, ks, x.first(), covered) && guarded(secret, ks, x.second(), covered);
    default:
      return true;
  }
}

// Small universe: three atoms, two encryption keys, terms of depth at most 3.
struct Universe {
  protosec::AgentId a = protosec::AgentId::friend_(1);
  protosec::AgentId b = protosec::AgentId::friend_(2);
  Message nonce = Message::nonce(7);
  Message pri_a = Message::key(protosec::pri_key(a));
  Message shr_b = Message::key(protosec::shr_key(b));
  std::vector<KeyId> crypt_keys{protosec::pub_key(a), protosec::shr_key(b)};
  std::vector<KeyId> guard_keys{protosec::pri_key(a), protosec::shr_key(b),
                                protosec::pub_key(a)};

  std::vector<Message> atoms() const { return {nonce, pri_a, shr_b}; }

  // Every term of depth <= 2, plus `extra` random depth-3 terms.
  std::vector<Message> terms(std::size_t extra, uint32_t seed) const {
    std::vector<Message> d0 = atoms();
    auto grow = [&](const std::vector<Message>& below) {
      std::vector<Message> out;
      for (const auto& x : below) {
        out.push_back(Message::hash(x));
        for (auto k : crypt_keys) out.push_back(Message::crypt(k, x));
        for (const auto& y : below) out.push_back(Message::pair(x, y));
      }
      return out;
    };
    std::vector<Message> le1 = d0;
    for (const auto& m : grow(d0)) le1.push_back(m);
    std::vector<Message> le2 = le1;
    for (const auto& m : grow(le1)) le2.push_back(m);
    std::sort(le2.begin(), le2.end());
    le2.erase(std::unique(le2.begin(), le2.end()), le2.end());

    std::mt19937 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, le2.size() - 1);
    std::uniform_int_distribution<int> ctor(0, 3);
    std::vector<Message> out = le2;
    while (out.size() < le2.size() + extra) {
      Message x = le2[pick(rng)];
      Message m = x;
      switch (ctor(rng)) {
        case 0: m = Message::hash(x); break;
        case 1: m = Message::crypt(crypt_keys[0], x); break;
        case 2: m = Message::crypt(crypt_keys[1], x); break;
        default: m = Message::pair(x, le2[pick(rng)]); break;
      }
      if (m.depth() == 3) out.push_back(m);
    }
    return out;
  }

  // Sets of size <= 3: every singleton of a small pool plus random pairs and
  // triples weighted toward terms with something to decrypt.
  std::vector<protosec::MessageSet> sets(std::size_t count, uint32_t seed) const {
    std::vector<Message> pool = terms(200, seed);
    std::mt19937 rng(seed + 1);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_atom(0, 2);
    std::uniform_int_distribution<int> size(0, 3);
    std::vector<protosec::MessageSet> out;
    out.emplace_back();
    for (const auto& a : atoms()) out.push_back({a});
    while (out.size() < count) {
      protosec::MessageSet s;
      int n = size(rng);
      for (int i = 0; i < n; ++i) {
        // One draw in three is a bare atom so keys are often available.
        s.insert(rng() % 3 == 0 ? atoms()[pick_atom(rng)] : pool[pick(rng)]);
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  std::vector<std::set<KeyId>> key_sets() const {
    std::vector<std::set<KeyId>> out{{}};
    for (std::size_t i = 0; i < guard_keys.size(); ++i) {
      out.push_back({guard_keys[i]});
      for (std::size_t j = i + 1; j < guard_keys.size(); ++j)
        out.push_back({guard_keys[i], guard_keys[j]});
    }
    return out;
  }
};

}  // namespace oracle

#endif  // PROTOSEC_TESTS_ORACLES_HPP_
