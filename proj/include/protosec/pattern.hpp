#ifndef PROTOSEC_PATTERN_HPP_
#define PROTOSEC_PATTERN_HPP_

// Message patterns: messages with typed variables. A substitution maps each
// variable to a ground value of its type; apm instantiates a pattern and match
// is its first-order inverse.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "protosec/message.hpp"

namespace protosec {

enum class VarType { kAgent, kNonce, kKey, kNumber, kMsg, kAgentList };

std::string_view var_type_name(VarType type);
std::optional<VarType> var_type_from_name(std::string_view name);

/// Values are stored as messages: Agent a, Nonce n, Key k, Number n, or any
/// message for msg variables and agent lists.
bool value_has_type(const Message& value, VarType type);

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class Substitution {
 public:
  Substitution() = default;

  std::optional<Message> get(std::string_view name) const;
  bool contains(std::string_view name) const { return get(name).has_value(); }
  /// Binds name to value; returns false if name is bound to something else.
  bool bind(const std::string& name, const Message& value);
  /// Throws UnboundVariable.
  Message at(std::string_view name) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Entries of this substitution restricted to the given names.
  Substitution restricted(const std::set<std::string>& names) const;
  bool extends(const Substitution& smaller) const;

  /// "{A -> Agent Friend 1, NA -> Nonce 5}"
  std::string str() const;

  friend bool operator==(const Substitution&, const Substitution&) = default;
  friend auto operator<=>(const Substitution&, const Substitution&) = default;

 private:
  // Sorted by name.
  std::vector<std::pair<std::string, Message>> entries_;
};

/// An agent position: a constant agent or an agent variable.
struct AgentTerm {
  std::variant<std::string, AgentId> value;

  bool is_var() const { return std::holds_alternative<std::string>(value); }
  const std::string& var() const { return std::get<std::string>(value); }
  AgentId agent() const { return std::get<AgentId>(value); }
  friend bool operator==(const AgentTerm&, const AgentTerm&) = default;
};

/// A natural position (payload of Number/Nonce): a constant or a variable.
struct NatTerm {
  std::variant<uint64_t, std::string> value;

  bool is_var() const { return std::holds_alternative<std::string>(value); }
  const std::string& var() const { return std::get<std::string>(value); }
  uint64_t constant() const { return std::get<uint64_t>(value); }
  friend bool operator==(const NatTerm&, const NatTerm&) = default;
};

/// A key position: a key number, a key variable, or pubK/priK/shrK of an
/// agent term.
struct KeyTerm {
  enum class Kind { kConst, kVar, kPub, kPri, kShr };
  Kind kind = Kind::kConst;
  KeyId constant;
  std::string var;
  AgentTerm agent;

  static KeyTerm of(KeyId k) { return KeyTerm{Kind::kConst, k, {}, {}}; }
  static KeyTerm variable(std::string name) { return KeyTerm{Kind::kVar, {}, std::move(name), {}}; }
  static KeyTerm derived(Kind kind, AgentTerm agent) { return KeyTerm{kind, {}, {}, std::move(agent)}; }
  friend bool operator==(const KeyTerm&, const KeyTerm&) = default;
};

class Pattern {
 public:
  enum class Kind { kNumber, kNonce, kAgent, kKey, kHash, kPair, kCrypt, kVar, kFunc };

  // Builtin functions evaluated on ground arguments: app(L1, L2), del(X, L),
  // head(L).
  static Pattern number(NatTerm n);
  static Pattern nonce(NatTerm n);
  static Pattern agent(AgentTerm a);
  static Pattern key(KeyTerm k);
  static Pattern hash(Pattern body);
  static Pattern pair(Pattern first, Pattern second);
  static Pattern tuple(const std::vector<Pattern>& items);
  static Pattern crypt(KeyTerm key, Pattern body);
  /// A bare variable of type kMsg or kAgentList.
  static Pattern var(std::string name, VarType type);
  static Pattern func(std::string name, std::vector<Pattern> args);
  static Pattern ground(const Message& m);

  Kind kind() const;
  const NatTerm& nat() const;
  const AgentTerm& agent_term() const;
  const KeyTerm& key_term() const;
  const Pattern& body() const;
  const Pattern& first() const;
  const Pattern& second() const;
  const std::string& var_name() const;
  VarType var_type() const;
  const std::string& func_name() const;
  const std::vector<Pattern>& args() const;

  /// No variables and no functions.
  bool is_ground() const;
  /// Contains no function nodes, so match applies.
  bool is_matchable() const;
  /// The ground message when is_ground().
  std::optional<Message> as_message() const;

  /// Variables with their types, by name.
  std::map<std::string, VarType> vars() const;
  void collect_vars(std::map<std::string, VarType>& out) const;

  /// Renders with `:type` annotations on the first occurrence of each variable
  /// not yet in `declared` (which is updated); pass nullptr for no annotations.
  std::string str(std::set<std::string>* declared = nullptr) const;

  friend bool operator==(const Pattern& a, const Pattern& b);

 private:
  struct Node;
  explicit Pattern(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Instantiates a pattern. Throws UnboundVariable for a variable outside the
/// domain of s; builtin functions are evaluated (may throw MalformedList).
Message apm(const Substitution& s, const Pattern& x);
KeyId apply_key(const Substitution& s, const KeyTerm& k);
AgentId apply_agent(const Substitution& s, const AgentTerm& a);

/// Least extension s of s0 with apm(s, x) = m, if any. Function nodes are
/// matched by evaluation and fail to match while their arguments are unbound.
std::optional<Substitution> match(const Pattern& x, const Message& m,
                                  const Substitution& s0 = {});

/// Renders a key term the way the protocol parser reads it.
std::string render_key_term(const KeyTerm& k, std::set<std::string>* declared);
std::string render_agent_term(const AgentTerm& a, std::set<std::string>* declared);

}  // namespace protosec

#endif  // PROTOSEC_PATTERN_HPP_
