#include "protosec/message.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <mutex>
#include <unordered_set>

#include "protosec/message_io.hpp"

namespace protosec {

uint64_t AgentId::code() const {
  switch (kind_) {
    case Kind::kServer:
      return 0;
    case Kind::kSpy:
      return 1;
    case Kind::kFriend:
      return index_ + 2;
  }
  return 0;
}

AgentId AgentId::from_code(uint64_t code) {
  if (code == 0) return server();
  if (code == 1) return spy();
  return friend_(code - 2);
}

std::string AgentId::str() const {
  switch (kind_) {
    case Kind::kServer:
      return "Server";
    case Kind::kSpy:
      return "Spy";
    case Kind::kFriend:
      return "Friend " + std::to_string(index_);
  }
  return "?";
}

KeyId pub_key(AgentId agent) { return KeyId(4 * agent.code() + 0); }
KeyId pri_key(AgentId agent) { return KeyId(4 * agent.code() + 1); }
KeyId shr_key(AgentId agent) { return KeyId(4 * agent.code() + 2); }
KeyId session_key(uint64_t index) { return KeyId(4 * index + 3); }

KeyKind key_kind(KeyId key) { return static_cast<KeyKind>(key.value() % 4); }

KeyId inv_key(KeyId key) {
  switch (key_kind(key)) {
    case KeyKind::kPublic:
      return KeyId(key.value() + 1);
    case KeyKind::kPrivate:
      return KeyId(key.value() - 1);
    case KeyKind::kShared:
    case KeyKind::kSession:
      return key;
  }
  return key;
}

std::optional<AgentId> key_owner(KeyId key) {
  if (key_kind(key) == KeyKind::kSession) return std::nullopt;
  return AgentId::from_code(key.value() / 4);
}

std::optional<uint64_t> session_index(KeyId key) {
  if (key_kind(key) != KeyKind::kSession) return std::nullopt;
  return key.value() / 4;
}

std::string describe_key(KeyId key) {
  switch (key_kind(key)) {
    case KeyKind::kPublic:
      return "pubK(" + key_owner(key)->str() + ")";
    case KeyKind::kPrivate:
      return "priK(" + key_owner(key)->str() + ")";
    case KeyKind::kShared:
      return "shrK(" + key_owner(key)->str() + ")";
    case KeyKind::kSession:
      return "sessionK(" + std::to_string(key.value() / 4) + ")";
  }
  return "?";
}

namespace detail {

struct Node {
  Message::Kind kind;
  // Number/Nonce value, agent code, or key value (atoms and Crypt).
  uint64_t payload;
  const Node* left;
  const Node* right;
  std::size_t hash;
  std::size_t size;
  std::size_t depth;
};

namespace {

struct NodeHash {
  std::size_t operator()(const Node* n) const { return n->hash; }
};

struct NodeEq {
  bool operator()(const Node* a, const Node* b) const {
    return a->kind == b->kind && a->payload == b->payload && a->left == b->left &&
           a->right == b->right;
  }
};

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

class InternTable {
 public:
  const Node* intern(Message::Kind kind, uint64_t payload, const Node* left, const Node* right) {
    Node probe{kind, payload, left, right, 0, 1, 0};
    std::size_t h = mix(static_cast<std::size_t>(kind), std::hash<uint64_t>()(payload));
    if (left != nullptr) {
      h = mix(h, left->hash);
      probe.size += left->size;
      probe.depth = left->depth + 1;
    }
    if (right != nullptr) {
      h = mix(h, right->hash);
      probe.size += right->size;
      probe.depth = std::max(probe.depth, right->depth + 1);
    }
    probe.hash = h;

    std::lock_guard<std::mutex> lock(mutex_);
    auto it = index_.find(&probe);
    if (it != index_.end()) return *it;
    storage_.push_back(probe);
    const Node* stored = &storage_.back();
    index_.insert(stored);
    return stored;
  }

 private:
  std::mutex mutex_;
  std::deque<Node> storage_;
  std::unordered_set<const Node*, NodeHash, NodeEq> index_;
};

InternTable& table() {
  static InternTable* t = new InternTable();
  return *t;
}

}  // namespace
}  // namespace detail

Message Message::number(uint64_t n) {
  return Message(detail::table().intern(Kind::kNumber, n, nullptr, nullptr));
}
Message Message::nonce(uint64_t n) {
  return Message(detail::table().intern(Kind::kNonce, n, nullptr, nullptr));
}
Message Message::agent(AgentId a) {
  return Message(detail::table().intern(Kind::kAgent, a.code(), nullptr, nullptr));
}
Message Message::key(KeyId k) {
  return Message(detail::table().intern(Kind::kKey, k.value(), nullptr, nullptr));
}
Message Message::hash(const Message& body) {
  return Message(detail::table().intern(Kind::kHash, 0, body.node_, nullptr));
}
Message Message::pair(const Message& first, const Message& second) {
  return Message(detail::table().intern(Kind::kPair, 0, first.node_, second.node_));
}
Message Message::crypt(KeyId key, const Message& body) {
  return Message(detail::table().intern(Kind::kCrypt, key.value(), body.node_, nullptr));
}

Message Message::tuple(std::initializer_list<Message> items) {
  return tuple(std::vector<Message>(items));
}

Message Message::tuple(const std::vector<Message>& items) {
  if (items.empty()) throw Error("Message::tuple requires at least one element");
  Message acc = items.back();
  for (auto it = items.rbegin() + 1; it != items.rend(); ++it) acc = pair(*it, acc);
  return acc;
}

Message::Kind Message::kind() const { return node_->kind; }

uint64_t Message::value() const {
  assert(kind() == Kind::kNumber || kind() == Kind::kNonce);
  return node_->payload;
}

AgentId Message::agent_id() const {
  assert(kind() == Kind::kAgent);
  return AgentId::from_code(node_->payload);
}

KeyId Message::key_id() const {
  assert(kind() == Kind::kKey || kind() == Kind::kCrypt);
  return KeyId(node_->payload);
}

Message Message::body() const {
  assert(kind() == Kind::kHash || kind() == Kind::kCrypt);
  return Message(node_->left);
}

Message Message::first() const {
  assert(kind() == Kind::kPair);
  return Message(node_->left);
}

Message Message::second() const {
  assert(kind() == Kind::kPair);
  return Message(node_->right);
}

std::size_t Message::size() const { return node_->size; }
std::size_t Message::depth() const { return node_->depth; }
std::size_t Message::hash_value() const { return node_->hash; }

std::string Message::str() const { return render(*this); }

namespace {

std::strong_ordering compare_nodes(const detail::Node* a, const detail::Node* b) {
  if (a == b) return std::strong_ordering::equal;
  if (auto c = a->kind <=> b->kind; c != 0) return c;
  switch (a->kind) {
    case Message::Kind::kNumber:
    case Message::Kind::kNonce:
    case Message::Kind::kKey:
      return a->payload <=> b->payload;
    case Message::Kind::kAgent:
      return AgentId::from_code(a->payload) <=> AgentId::from_code(b->payload);
    case Message::Kind::kHash:
      return compare_nodes(a->left, b->left);
    case Message::Kind::kPair:
      if (auto c = compare_nodes(a->left, b->left); c != 0) return c;
      return compare_nodes(a->right, b->right);
    case Message::Kind::kCrypt:
      if (auto c = a->payload <=> b->payload; c != 0) return c;
      return compare_nodes(a->left, b->left);
  }
  return std::strong_ordering::equal;
}

}  // namespace

std::strong_ordering operator<=>(const Message& a, const Message& b) {
  return compare_nodes(a.node_, b.node_);
}

bool MessageSet::is_subset_of(const MessageSet& other) const {
  return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
}

MessageSet MessageSet::united(const MessageSet& other) const {
  MessageSet out = *this;
  out.insert_all(other);
  return out;
}

MessageSet MessageSet::minus(const MessageSet& other) const {
  MessageSet out;
  std::set_difference(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                      std::inserter(out.items_, out.items_.end()));
  return out;
}

std::string MessageSet::str() const {
  std::string out = "{";
  bool first = true;
  for (const auto& m : items_) {
    if (!first) out += ", ";
    first = false;
    out += m.str();
  }
  return out + "}";
}

}  // namespace protosec
