#ifndef PROTOSEC_PRESERVATION_HPP_
#define PROTOSEC_PRESERVATION_HPP_

// Secrecy queries checked over bounded explorations: per-rule preservation of
// guardedness, secrecy with attack traces, and unicity of nonce-carrying
// messages.

#include <optional>
#include <string>
#include <vector>

#include "protosec/explore.hpp"
#include "protosec/guard.hpp"
#include "protosec/protocol.hpp"

namespace protosec {

/// A guarding key set: fixed key terms over the origin variables plus, for
/// every trace pattern, the keys bound to its key variable by events of the
/// trace.
struct KeySetExpr {
  struct FromTrace {
    std::string key_var;
    EventPattern pattern;
    friend bool operator==(const FromTrace&, const FromTrace&) = default;
  };
  std::vector<KeyTerm> fixed;
  std::vector<FromTrace> from_trace;

  KeySet resolve(const Substitution& origin, const Trace& evs) const;
  bool trace_dependent() const { return !from_trace.empty(); }
  std::string str(std::set<std::string>* declared = nullptr) const;

  friend bool operator==(const KeySetExpr&, const KeySetExpr&) = default;
};

struct SecrecyQuery {
  std::string name;
  std::string origin_rule;
  /// A nonce variable in newn or a key variable in newk of the origin rule.
  std::string secret_var;
  KeySetExpr ks;
  /// Agent variables of the origin rule that must not be bad.
  std::vector<std::string> honest;

  friend bool operator==(const SecrecyQuery&, const SecrecyQuery&) = default;
};

/// A secret introduced by an instance of the origin rule in a trace.
struct OriginInstance {
  Secret secret;
  KeySet ks;
  Substitution subst;
  std::size_t position;  // index of the introducing step
};

/// Origin instances of q in st whose honesty assumptions hold and for which
/// fresh(origin, s, n, Ks, evs) holds.
std::vector<OriginInstance> origin_instances(const ExplorationState& st, const Protocol& p,
                                             const SecrecyQuery& q);

class InitKnowledgeViolation : public Error {
 public:
  explicit InitKnowledgeViolation(const std::string& what) : Error(what) {}
};

struct RuleVerdict {
  enum class Outcome { kPreserved, kViolated, kUnknown };
  std::string rule;
  Outcome outcome = Outcome::kPreserved;
  std::size_t checks = 0;
  /// For kViolated: the trace before the offending step, and the step.
  std::vector<Step> trace;
  std::optional<Step> step;
  std::string reason;
};

std::string_view outcome_name(RuleVerdict::Outcome o);

struct PreservationResult {
  std::vector<RuleVerdict> rules;
  RuleVerdict::Outcome global = RuleVerdict::Outcome::kPreserved;
  ExplorationReport report;
  std::size_t origin_instances = 0;
  /// States where the origin instance was safe but spies evs was not guarded.
  /// Zero whenever every rule is preserved.
  std::size_t unguarded_safe_states = 0;

  /// "rule NS1: preserved" lines followed by "global: preserved".
  std::string str() const;
};

PreservationResult check_preservation(const Protocol& p, const SecrecyQuery& q,
                                      const ExplorationBounds& b);

struct SecrecyResult {
  enum class Outcome { kHoldsWithinBounds, kAttack, kUnknown };
  Outcome outcome = Outcome::kHoldsWithinBounds;
  /// For kAttack: a shortest trace found in which the secret is deducible.
  std::vector<Step> trace;
  std::optional<Secret> secret;
  ExplorationReport report;
  std::size_t origin_instances = 0;
  std::string reason;
};

std::string_view outcome_name(SecrecyResult::Outcome o);

/// Throws InitKnowledgeViolation when a secret is unguarded in the spy's
/// initial knowledge.
SecrecyResult check_secrecy(const Protocol& p, const SecrecyQuery& q, const ExplorationBounds& b);

struct UnicityShape {
  std::string name;
  Pattern first = Pattern::number(NatTerm{uint64_t{0}});
  Pattern second = Pattern::number(NatTerm{uint64_t{0}});
  /// Nonce variable shared by the two shapes.
  std::string secret_var;
  /// Variable pairs that must agree; empty means the two shapes may never
  /// both occur while the nonce is secret.
  std::vector<std::pair<std::string, std::string>> equalities;

  friend bool operator==(const UnicityShape&, const UnicityShape&) = default;
};

struct UnicityResult {
  bool holds = true;
  bool truncated = false;
  std::size_t pairs_checked = 0;
  std::vector<Step> trace;
  std::optional<Substitution> bindings;
  ExplorationReport report;
};

UnicityResult check_unicity(const Protocol& p, const UnicityShape& shape,
                            const ExplorationBounds& b);

/// Pairs of parts(spies evs) members matching the shapes that violate the
/// lemma in this state.
std::optional<Substitution> unicity_violation(const ExplorationState& st, const UnicityShape& shape,
                                              std::size_t* pairs_checked = nullptr);

std::string render_steps(const std::vector<Step>& steps);

}  // namespace protosec

#endif  // PROTOSEC_PRESERVATION_HPP_
