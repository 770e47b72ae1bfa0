#ifndef PROTOSEC_CLOSURE_HPP_
#define PROTOSEC_CLOSURE_HPP_

#include <cstddef>

#include "protosec/message.hpp"

namespace protosec {

/// Least superset of H closed under taking pair components and Crypt bodies.
/// Hash bodies are not parts of the hash.
MessageSet parts(const MessageSet& h);

/// Least superset of H closed under taking pair components and under
/// decryption: Crypt K X and Key (invKey K) yield X.
MessageSet analz(const MessageSet& h);

/// Membership in synth H. Agents and numbers are always synthesizable; nonces
/// and keys only when they are members of H. Pass an analz-closed set to
/// decide membership in synth (analz H).
bool synth_member(const Message& x, const MessageSet& h);

/// Pairs of H together with every component, recursively, that is a pair.
MessageSet pparts(const MessageSet& h);

/// Non-pair members of H together with every non-pair reached by splitting
/// pairs of H recursively.
MessageSet kparts(const MessageSet& h);

/// Number of members of H whose outermost constructor is Crypt.
std::size_t crypt_measure(const MessageSet& h);

/// Incrementally maintained analz closure. Adding messages one by one yields
/// the same set as analz of their union.
class AnalzClosure {
 public:
  AnalzClosure() = default;
  explicit AnalzClosure(const MessageSet& h);

  void add(const Message& m);
  void add_all(const MessageSet& h);

  const MessageSet& known() const { return known_; }
  bool contains(const Message& m) const { return known_.contains(m); }

 private:
  MessageSet known_;
  // Crypt bodies waiting for the key that decrypts them, keyed by that key.
  std::vector<std::pair<KeyId, Message>> locked_;
};

}  // namespace protosec

#endif  // PROTOSEC_CLOSURE_HPP_
