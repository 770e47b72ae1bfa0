#ifndef PROTOSEC_GUARD_HPP_
#define PROTOSEC_GUARD_HPP_

// Guarded messages. A secret atom (nonce or key) is guarded in X by a key set
// Ks when every occurrence of the secret in X sits under an encryption whose
// inverse key is in Ks. If every message of G is guarded and the secret is in
// analz G, some key of Ks is in analz G as well; secrecy_witness computes that
// key by the descent on the number of encryptions.

#include <optional>
#include <set>
#include <string>
#include <variant>

#include "protosec/message.hpp"

namespace protosec {

class Secret {
 public:
  static Secret nonce(uint64_t n) { return Secret(Message::nonce(n)); }
  static Secret key(KeyId k) { return Secret(Message::key(k)); }
  /// Accepts a Nonce or Key atom; throws Error otherwise.
  static Secret from_message(const Message& atom);

  /// The atom itself (Nonce n or Key k).
  const Message& atom() const { return atom_; }
  bool is_nonce() const { return atom_.kind() == Message::Kind::kNonce; }
  std::string str() const { return atom_.str(); }

  friend bool operator==(const Secret&, const Secret&) = default;
  friend auto operator<=>(const Secret&, const Secret&) = default;

 private:
  explicit Secret(Message atom) : atom_(atom) {}

  Message atom_;
};

using KeySet = std::set<KeyId>;

std::string render_key_set(const KeySet& ks);

struct GuardSpec {
  Secret secret;
  KeySet ks;
};

/// True iff the secret atom occurs in parts {x}.
bool occurs(const Secret& secret, const Message& x);

/// Membership of x in guard n Ks.
bool guard_member(const GuardSpec& spec, const Message& x);

/// Every member of g is guarded.
bool guard_set(const GuardSpec& spec, const MessageSet& g);

/// First unguarded member of g in canonical order, if any.
std::optional<Message> first_unguarded(const GuardSpec& spec, const MessageSet& g);

class GuardViolation : public Error {
 public:
  explicit GuardViolation(const Message& offending);
  const Message& offending() const { return offending_; }

 private:
  Message offending_;
};

struct SecretSafe {
  friend bool operator==(const SecretSafe&, const SecretSafe&) = default;
};
struct SomeKey {
  KeyId key;
  friend bool operator==(const SomeKey&, const SomeKey&) = default;
};
using Witness = std::variant<SecretSafe, SomeKey>;

/// Constructive secrecy theorem. Requires guard_set(spec, g) (GuardViolation
/// otherwise). Returns SomeKey(K) with K in Ks and Key K in analz g whenever
/// the secret is in analz g, and SecretSafe when it is not.
Witness secrecy_witness(const GuardSpec& spec, const MessageSet& g);

/// One step of the descent used by secrecy_witness, exposed for tests.
struct DescentStep {
  MessageSet before;    // kparts of the current set
  Message decrypted;    // Crypt K Y chosen in `before`
  MessageSet after;     // (before \ {Crypt K Y}) u {Y}
};

/// The descent steps taken by secrecy_witness, in order.
std::vector<DescentStep> secrecy_descent(const GuardSpec& spec, const MessageSet& g);

}  // namespace protosec

#endif  // PROTOSEC_GUARD_HPP_
