#ifndef PROTOSEC_MESSAGE_HPP_
#define PROTOSEC_MESSAGE_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace protosec {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An agent name: the trusted server, one of infinitely many friends, or the
/// spy.
class AgentId {
 public:
  enum class Kind : uint8_t { kServer, kFriend, kSpy };

  static AgentId server() { return AgentId(Kind::kServer, 0); }
  static AgentId friend_(uint64_t index) { return AgentId(Kind::kFriend, index); }
  static AgentId spy() { return AgentId(Kind::kSpy, 0); }

  Kind kind() const { return kind_; }
  uint64_t index() const { return index_; }

  bool is_spy() const { return kind_ == Kind::kSpy; }
  bool is_server() const { return kind_ == Kind::kServer; }

  /// Dense numbering used by the key map: Server = 0, Spy = 1, Friend i = i+2.
  uint64_t code() const;
  static AgentId from_code(uint64_t code);

  std::string str() const;

  friend bool operator==(const AgentId&, const AgentId&) = default;
  friend std::strong_ordering operator<=>(const AgentId&, const AgentId&) = default;

 private:
  AgentId(Kind kind, uint64_t index) : kind_(kind), index_(index) {}

  Kind kind_;
  uint64_t index_;
};

/// A key is a natural number. Long-term keys of agents are assigned by the key
/// map below; invKey is an involution over all naturals.
class KeyId {
 public:
  constexpr KeyId() = default;
  constexpr explicit KeyId(uint64_t value) : value_(value) {}

  constexpr uint64_t value() const { return value_; }

  friend bool operator==(const KeyId&, const KeyId&) = default;
  friend std::strong_ordering operator<=>(const KeyId&, const KeyId&) = default;

 private:
  uint64_t value_ = 0;
};

// Key map. Every natural k encodes (agent code, kind) as k = 4 * code + kind
// for kind 0 = pubK, 1 = priK, 2 = shrK; kind 3 is reserved for session keys
// sessionK(i) = 4 * i + 3. The map is injective with disjoint ranges.
enum class KeyKind : uint8_t { kPublic = 0, kPrivate = 1, kShared = 2, kSession = 3 };

KeyId pub_key(AgentId agent);
KeyId pri_key(AgentId agent);
KeyId shr_key(AgentId agent);
KeyId session_key(uint64_t index);
KeyId inv_key(KeyId key);
KeyKind key_kind(KeyId key);
/// Owner of a long-term key; nullopt for session keys.
std::optional<AgentId> key_owner(KeyId key);
/// Session index of a session key; nullopt for long-term keys.
std::optional<uint64_t> session_index(KeyId key);
/// Symbolic description, e.g. "pubK(Friend 1)" or "sessionK(3)".
std::string describe_key(KeyId key);

namespace detail {
struct Node;
}  // namespace detail

/// A message of the free term algebra. Values are hash-consed: structurally
/// equal messages share one immutable node, so copies are a pointer and
/// equality is pointer comparison. Ordering is the canonical structural order
/// (constructor, then fields), which never depends on allocation history.
class Message {
 public:
  enum class Kind : uint8_t { kNumber, kNonce, kAgent, kKey, kHash, kPair, kCrypt };

  static Message number(uint64_t n);
  static Message nonce(uint64_t n);
  static Message agent(AgentId a);
  static Message key(KeyId k);
  static Message hash(const Message& body);
  static Message pair(const Message& first, const Message& second);
  static Message crypt(KeyId key, const Message& body);
  /// Right-nested tuple {x1, {x2, ... xn}}; requires at least one element.
  static Message tuple(std::initializer_list<Message> items);
  static Message tuple(const std::vector<Message>& items);

  Kind kind() const;
  bool is_pair() const { return kind() == Kind::kPair; }
  bool is_crypt() const { return kind() == Kind::kCrypt; }
  bool is_atom() const { return kind() <= Kind::kKey; }

  /// Payload of Number and Nonce.
  uint64_t value() const;
  AgentId agent_id() const;
  /// Key of a Key atom, or the encrypting key of a Crypt.
  KeyId key_id() const;
  /// Body of Hash and Crypt.
  Message body() const;
  Message first() const;
  Message second() const;

  /// Number of constructor nodes.
  std::size_t size() const;
  /// Atoms have depth 0.
  std::size_t depth() const;
  std::size_t hash_value() const;

  /// Canonical textual rendering (see message_io.hpp).
  std::string str() const;

  friend bool operator==(const Message& a, const Message& b) { return a.node_ == b.node_; }
  friend std::strong_ordering operator<=>(const Message& a, const Message& b);

 private:
  explicit Message(const detail::Node* node) : node_(node) {}

  const detail::Node* node_;
};

/// Finite message set with canonical (order-insensitive, duplicate-free)
/// equality. Iteration follows the canonical message order.
class MessageSet {
 public:
  using const_iterator = std::set<Message>::const_iterator;

  MessageSet() = default;
  MessageSet(std::initializer_list<Message> items) : items_(items) {}
  template <class It>
  MessageSet(It first, It last) : items_(first, last) {}

  bool contains(const Message& m) const { return items_.count(m) != 0; }
  /// Returns true when m was not present.
  bool insert(const Message& m) { return items_.insert(m).second; }
  bool erase(const Message& m) { return items_.erase(m) != 0; }
  void insert_all(const MessageSet& other) { items_.insert(other.begin(), other.end()); }

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const_iterator begin() const { return items_.begin(); }
  const_iterator end() const { return items_.end(); }

  bool is_subset_of(const MessageSet& other) const;
  MessageSet united(const MessageSet& other) const;
  MessageSet minus(const MessageSet& other) const;
  std::vector<Message> to_vector() const { return {items_.begin(), items_.end()}; }

  /// "{m1, m2, ...}" with members in canonical order.
  std::string str() const;

  friend bool operator==(const MessageSet&, const MessageSet&) = default;

 private:
  std::set<Message> items_;
};

}  // namespace protosec

template <>
struct std::hash<protosec::Message> {
  std::size_t operator()(const protosec::Message& m) const noexcept { return m.hash_value(); }
};

#endif  // PROTOSEC_MESSAGE_HPP_
