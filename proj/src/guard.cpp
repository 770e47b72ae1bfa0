#include "protosec/guard.hpp"

#include "protosec/closure.hpp"

namespace protosec {

Secret Secret::from_message(const Message& atom) {
  if (atom.kind() != Message::Kind::kNonce && atom.kind() != Message::Kind::kKey)
    throw Error("a secret must be a Nonce or a Key, got " + atom.str());
  return Secret(atom);
}

std::string render_key_set(const KeySet& ks) {
  std::string out = "{";
  bool first = true;
  for (KeyId k : ks) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(k.value());
  }
  return out + "}";
}

bool occurs(const Secret& secret, const Message& x) {
  if (x == secret.atom()) return true;
  switch (x.kind()) {
    case Message::Kind::kPair:
      return occurs(secret, x.first()) || occurs(secret, x.second());
    case Message::Kind::kCrypt:
      return occurs(secret, x.body());
    default:
      return false;
  }
}

bool guard_member(const GuardSpec& spec, const Message& x) {
  if (!occurs(spec.secret, x)) return true;  // No_Nonce
  switch (x.kind()) {
    case Message::Kind::kCrypt:
      return spec.ks.count(inv_key(x.key_id())) != 0 || guard_member(spec, x.body());
    case Message::Kind::kPair:
      return guard_member(spec, x.first()) && guard_member(spec, x.second());
    default:
      return false;
  }
}

bool guard_set(const GuardSpec& spec, const MessageSet& g) {
  return !first_unguarded(spec, g).has_value();
}

std::optional<Message> first_unguarded(const GuardSpec& spec, const MessageSet& g) {
  for (const auto& m : g)
    if (!guard_member(spec, m)) return m;
  return std::nullopt;
}

GuardViolation::GuardViolation(const Message& offending)
    : Error("message not guarded: " + offending.str()), offending_(offending) {}

namespace {

struct DescentResult {
  Witness witness;
  std::vector<DescentStep> steps;
};

DescentResult descend(const GuardSpec& spec, const MessageSet& g) {
  if (auto bad = first_unguarded(spec, g)) throw GuardViolation(*bad);

  DescentResult result{SecretSafe{}, {}};
  if (!analz(g).contains(spec.secret.atom())) return result;

  // Invariant: cur is guarded, contains no pairs after kparts, analz(cur) is
  // contained in analz(g), and the secret is in analz(cur). Every step removes
  // one Crypt node, so the loop terminates.
  MessageSet cur = kparts(g);
  for (;;) {
    std::optional<Message> chosen;
    for (const auto& c : cur) {  // canonical order: first candidate is smallest
      if (!c.is_crypt()) continue;
      MessageSet rest = cur;
      rest.erase(c);
      if (analz(rest).contains(Message::key(inv_key(c.key_id())))) {
        chosen = c;
        break;
      }
    }
    if (!chosen) {
      // Unreachable when the theorem holds: without a decryption the secret
      // would have to be a bare member of a guarded set.
      throw Error("secrecy descent stuck on " + cur.str());
    }
    KeyId decrypting = inv_key(chosen->key_id());
    if (spec.ks.count(decrypting) != 0) {
      result.witness = SomeKey{decrypting};
      return result;
    }
    MessageSet next = cur;
    next.erase(*chosen);
    next.insert(chosen->body());
    next = kparts(next);
    result.steps.push_back(DescentStep{cur, *chosen, next});
    cur = std::move(next);
  }
}

}  // namespace

Witness secrecy_witness(const GuardSpec& spec, const MessageSet& g) {
  return descend(spec, g).witness;
}

std::vector<DescentStep> secrecy_descent(const GuardSpec& spec, const MessageSet& g) {
  return descend(spec, g).steps;
}

}  // namespace protosec
