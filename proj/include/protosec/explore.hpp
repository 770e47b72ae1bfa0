#ifndef PROTOSEC_EXPLORE_HPP_
#define PROTOSEC_EXPLORE_HPP_

// Bounded depth-first enumeration of protocol traces.
//
// Reduction choices:
//  * states are identified by their set of events; a trace whose event set was
//    already visited is not explored again (every rule and fake condition
//    depends on the event set only);
//  * fresh nonces and session keys are taken canonically, the smallest unused
//    pool value first, since unused values are interchangeable;
//  * the spy's fake messages are instances of rule precondition shapes built
//    from what the spy can analyse, filtered by synth membership;
//  * a fake event must be consumed by the step right after it: a fake no
//    rule reads adds nothing to the spy's knowledge, and a consumed fake
//    can always be delayed until just before its first reader;
//  * at most max_fakes fake events per trace.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "protosec/closure.hpp"
#include "protosec/protocol.hpp"

namespace protosec {

class BoundsTooSmall : public Error {
 public:
  using Error::Error;
};

struct ExplorationBounds {
  std::size_t max_trace_len = 4;
  std::vector<AgentId> agent_pool;
  std::vector<uint64_t> nonce_pool;
  std::vector<uint64_t> number_pool{0};
  /// Indices i of the session keys sessionK(i) available as fresh keys.
  std::vector<uint64_t> session_key_pool;
  /// Agent-list variables range over lists of pool agents up to this length.
  std::size_t max_list_len = 1;
  std::size_t max_fakes = 1;
  /// Exploration stops, reporting itself incomplete, after this many states.
  std::size_t max_states = 5'000'000;
  /// Take only the smallest unused nonce and key for fresh variables.
  bool canonical_fresh = true;

  /// Throws BoundsTooSmall when the pools cannot instantiate any rule.
  void validate(const Protocol& p) const;

  /// The first `agents` declared agents (the spy is always added), and
  /// nonces_per_role nonces and session keys for each rule introducing one.
  static ExplorationBounds for_protocol(const Protocol& p, std::size_t max_len,
                                        std::size_t agents, std::size_t nonces_per_role);
};

/// One event of an explored trace with its justification: the rule name and
/// substitution, or an empty rule name for a Fake step.
struct Step {
  Event event;
  std::string rule;
  Substitution subst;

  bool is_fake() const { return rule.empty(); }
  std::string str() const;
  friend bool operator==(const Step&, const Step&) = default;
};

Trace trace_of(const std::vector<Step>& steps);

class ExplorationState {
 public:
  explicit ExplorationState(const Protocol& p);

  const std::vector<Step>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  Trace trace() const { return trace_of(steps_); }
  bool has_event(const Event& e) const;
  std::size_t fakes() const { return fakes_; }

  /// analz(spies evs)
  const AnalzClosure& analz() const { return analz_; }
  /// parts(spies evs)
  const MessageSet& spied_parts() const { return spied_parts_; }
  const MessageSet& used() const { return used_; }

  ExplorationState after(const Step& step) const;
  void apply(const Step& step);

  /// Order-independent digest of the event set.
  std::pair<uint64_t, uint64_t> key() const { return key_; }
  std::pair<uint64_t, uint64_t> key_with(const Event& e) const;

 private:
  std::vector<Step> steps_;
  std::size_t fakes_ = 0;
  AnalzClosure analz_;
  MessageSet spied_parts_;
  MessageSet used_;
  std::pair<uint64_t, uint64_t> key_{0, 0};
};

/// Substitutions s with ok(evs, r, s) whose free variables take pool values
/// and whose remaining variables are bound by matching preconditions against
/// the trace. Sorted and duplicate-free.
/// With `reading`, instances for the trace extended by that event which have
/// a precondition matching it. The event's nonces and keys must already be
/// used, as they are for any fake.
std::vector<Substitution> enabled_instances(const ExplorationState& st, const Rule& r,
                                            const ExplorationBounds& b, const Protocol& p,
                                            const Event* reading = nullptr);
std::vector<Substitution> enabled_instances(const Trace& evs, const Rule& r,
                                            const ExplorationBounds& b, const Protocol& p);

/// Pattern-directed subset of synth(analz(spies evs)).
MessageSet fake_messages(const ExplorationState& st, const Protocol& p, const ExplorationBounds& b);
MessageSet fake_messages(const Trace& evs, const Protocol& p, const ExplorationBounds& b);
/// Fake events Says Spy B X not yet in the trace, in canonical order.
std::vector<Event> fake_events(const ExplorationState& st, const Protocol& p,
                               const ExplorationBounds& b);

/// Every step the engine would consider from st: rule instances ordered by
/// rule name then substitution, followed by fake steps when allowed.
/// Steps whose event is already in the trace are omitted. With `reading`,
/// the rule steps of the trace extended by that event which read it.
std::vector<Step> successors(const ExplorationState& st, const Protocol& p,
                             const ExplorationBounds& b, bool include_fakes,
                             const Event* reading = nullptr);

class Visitor {
 public:
  virtual ~Visitor() = default;
  /// Called once per distinct reachable state. Return false to stop.
  virtual bool on_state(const ExplorationState& st) {
    (void)st;
    return true;
  }
  /// When true, on_transition also sees rule steps leaving states at the
  /// length bound.
  virtual bool wants_transitions() const { return false; }
  virtual bool on_transition(const ExplorationState& st, const Step& step) {
    (void)st;
    (void)step;
    return true;
  }
  /// Called when every transition of st has been handled.
  virtual void on_leave(const ExplorationState& st) { (void)st; }
};

struct ExplorationReport {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t longest = 0;
  /// The state budget ran out before the bounded space was exhausted.
  bool truncated = false;
  /// The visitor asked to stop.
  bool stopped = false;
};

ExplorationReport explore(const Protocol& p, const ExplorationBounds& b, Visitor& v);

/// Checks that each step is justified at its position: a Fake step is sent by
/// the spy with a body in synth(analz(spies prefix)); a rule step instantiates
/// the rule's conclusion with ok holding. Returns a description of the first
/// failure.
std::optional<std::string> replay_error(const Protocol& p, const std::vector<Step>& steps);

}  // namespace protosec

#endif  // PROTOSEC_EXPLORE_HPP_
