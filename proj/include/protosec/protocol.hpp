#ifndef PROTOSEC_PROTOCOL_HPP_
#define PROTOSEC_PROTOCOL_HPP_

// Rules and protocols. A rule is a set of precondition event patterns, a set
// of side conditions and a conclusion event pattern. Traces are stored oldest
// event first; appending an event corresponds to `ev # evs`.

#include <compare>
#include <set>
#include <string>
#include <vector>

#include "protosec/guard.hpp"
#include "protosec/message.hpp"
#include "protosec/pattern.hpp"

namespace protosec {

struct Event {
  AgentId sender;
  AgentId recipient;
  Message body;

  /// "Says Friend 1 Friend 2 Crypt(8){...}"
  std::string str() const;
  std::size_t hash_value() const;

  friend bool operator==(const Event&, const Event&) = default;
  friend std::strong_ordering operator<=>(const Event&, const Event&) = default;
};

Event says(AgentId sender, AgentId recipient, const Message& body);

using Trace = std::vector<Event>;

struct EventPattern {
  AgentTerm sender;
  AgentTerm recipient;
  Pattern body;

  Event instantiate(const Substitution& s) const;
  std::optional<Substitution> match(const Event& e, const Substitution& s0 = {}) const;
  void collect_vars(std::map<std::string, VarType>& out) const;
  std::string str(std::set<std::string>* declared = nullptr) const;

  friend bool operator==(const EventPattern&, const EventPattern&) = default;
};

/// Side condition of a rule, evaluated on a complete substitution.
struct Condition {
  enum class Kind { kIn, kEqual, kNotEqual, kIsIn };
  Kind kind = Kind::kEqual;
  Pattern lhs = Pattern::number(NatTerm{uint64_t{0}});
  Pattern rhs = Pattern::number(NatTerm{uint64_t{0}});
  /// Allowed values for kIn.
  std::vector<Message> values;

  static Condition in(Pattern var, std::vector<Message> values);
  static Condition equal(Pattern a, Pattern b);
  static Condition not_equal(Pattern a, Pattern b);
  /// isin(element, list)
  static Condition is_in(Pattern element, Pattern list);

  bool holds(const Substitution& s) const;
  void collect_vars(std::map<std::string, VarType>& out) const;
  std::string str(std::set<std::string>* declared = nullptr) const;

  friend bool operator==(const Condition&, const Condition&) = default;
};

class Rule {
 public:
  Rule(std::string name, std::vector<EventPattern> pres, EventPattern post,
       std::vector<Condition> wheres = {});

  const std::string& name() const { return name_; }
  const std::vector<EventPattern>& pres() const { return pres_; }
  const EventPattern& post() const { return post_; }
  const std::vector<Condition>& wheres() const { return wheres_; }

  /// Every variable of the rule with its type.
  const std::map<std::string, VarType>& vars() const { return vars_; }
  /// Variables occurring in some precondition.
  const std::set<std::string>& pre_vars() const { return pre_vars_; }
  /// Nonce variables of the conclusion absent from all preconditions.
  std::set<std::string> newn() const;
  /// Key variables of the conclusion absent from all preconditions; these
  /// stand for fresh session keys.
  std::set<std::string> newk() const;

  bool wheres_hold(const Substitution& s) const;

  friend bool operator==(const Rule& a, const Rule& b);

 private:
  std::string name_;
  std::vector<EventPattern> pres_;
  EventPattern post_;
  std::vector<Condition> wheres_;
  std::map<std::string, VarType> vars_;
  std::set<std::string> pre_vars_;
};

class DuplicateRuleName : public Error {
 public:
  explicit DuplicateRuleName(const std::string& name);
};

class Protocol {
 public:
  Protocol() = default;
  Protocol(std::string name, std::vector<AgentId> agents, std::set<AgentId> bad,
           std::vector<Rule> rules);

  const std::string& name() const { return name_; }
  /// Agents of the model; initial knowledge ranges over them.
  const std::vector<AgentId>& agents() const { return agents_; }
  /// Compromised agents besides the spy.
  const std::set<AgentId>& bad() const { return bad_; }
  const std::vector<Rule>& rules() const { return rules_; }

  /// The spy and every member of bad().
  bool is_bad(AgentId a) const { return a.is_spy() || bad_.count(a) != 0; }
  /// Throws Error for an unknown name.
  const Rule& rule(const std::string& name) const;
  const Rule* find_rule(const std::string& name) const;

  void set_bad(std::set<AgentId> bad) { bad_ = std::move(bad); }
  void add_rule(Rule r);

  friend bool operator==(const Protocol&, const Protocol&) = default;

 private:
  std::string name_;
  std::vector<AgentId> agents_;
  std::set<AgentId> bad_;
  std::vector<Rule> rules_;
};

/// Every agent knows the names of all agents, all public keys, and its own
/// private and shared keys. The spy also knows the private and shared keys of
/// every bad agent.
MessageSet init_state(AgentId a, const Protocol& p);
MessageSet spies(const Trace& evs, const Protocol& p);
/// parts of everything sent and of every agent's initial knowledge.
MessageSet used(const Trace& evs, const Protocol& p);

/// Every instantiated precondition is in evs, every new nonce and new key is
/// unused, and the side conditions hold. Throws UnboundVariable.
bool ok(const Trace& evs, const Rule& r, const Substitution& s, const Protocol& p);

/// The s-instance of the conclusion of r occurs in evs, n is the image of a
/// new variable of r, and the secret is guarded by ks in its body.
bool fresh(const Rule& r, const Substitution& s, const Secret& n, const KeySet& ks,
           const Trace& evs);

/// No key of ks is in analz(spies evs).
bool safe(const KeySet& ks, const Trace& evs, const Protocol& p);

}  // namespace protosec

template <>
struct std::hash<protosec::Event> {
  std::size_t operator()(const protosec::Event& e) const noexcept { return e.hash_value(); }
};

#endif  // PROTOSEC_PROTOCOL_HPP_
