#include "protosec/preservation.hpp"

#include <algorithm>
#include <map>

namespace protosec {

KeySet KeySetExpr::resolve(const Substitution& origin, const Trace& evs) const {
  KeySet out;
  for (const auto& k : fixed) out.insert(apply_key(origin, k));
  for (const auto& t : from_trace) {
    for (const auto& e : evs) {
      auto s = t.pattern.match(e, origin);
      if (!s) continue;
      Message k = s->at(t.key_var);
      if (k.kind() == Message::Kind::kKey) out.insert(k.key_id());
    }
  }
  return out;
}

std::string KeySetExpr::str(std::set<std::string>* declared) const {
  std::string out = "{";
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (i != 0) out += ", ";
    out += render_key_term(fixed[i], declared);
  }
  out += "}";
  for (const auto& t : from_trace) {
    out += " + keys $" + t.key_var + " from " + t.pattern.str(declared);
  }
  return out;
}

std::vector<OriginInstance> origin_instances(const ExplorationState& st, const Protocol& p,
                                             const SecrecyQuery& q) {
  const Rule& origin = p.rule(q.origin_rule);
  std::vector<OriginInstance> out;
  Trace evs;
  for (std::size_t i = 0; i < st.steps().size(); ++i) {
    const Step& step = st.steps()[i];
    evs.push_back(step.event);
    if (step.rule != q.origin_rule) continue;
    const Substitution& s = step.subst;
    bool honest = std::all_of(q.honest.begin(), q.honest.end(), [&](const std::string& v) {
      return !p.is_bad(s.at(v).agent_id());
    });
    if (!honest) continue;
    out.push_back(OriginInstance{Secret::from_message(s.at(q.secret_var)), {}, s, i});
  }
  Trace full = st.trace();
  std::vector<OriginInstance> fresh_ones;
  for (auto& inst : out) {
    inst.ks = q.ks.resolve(inst.subst, full);
    if (fresh(origin, inst.subst, inst.secret, inst.ks, full)) fresh_ones.push_back(std::move(inst));
  }
  return fresh_ones;
}

std::string_view outcome_name(RuleVerdict::Outcome o) {
  switch (o) {
    case RuleVerdict::Outcome::kPreserved:
      return "preserved";
    case RuleVerdict::Outcome::kViolated:
      return "violated";
    case RuleVerdict::Outcome::kUnknown:
      return "unknown";
  }
  return "?";
}

std::string_view outcome_name(SecrecyResult::Outcome o) {
  switch (o) {
    case SecrecyResult::Outcome::kHoldsWithinBounds:
      return "HoldsWithinBounds";
    case SecrecyResult::Outcome::kAttack:
      return "Attack";
    case SecrecyResult::Outcome::kUnknown:
      return "Unknown";
  }
  return "?";
}

std::string render_steps(const std::vector<Step>& steps) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i)
    out += "  " + std::to_string(i + 1) + ". " + steps[i].str() + "\n";
  return out;
}

std::string PreservationResult::str() const {
  std::string out;
  for (const auto& r : rules) {
    out += "rule " + r.rule + ": " + std::string(outcome_name(r.outcome)) + "\n";
  }
  out += "global: " + std::string(outcome_name(global)) + "\n";
  return out;
}

namespace {

bool spies_guarded(const GuardSpec& spec, const MessageSet& init, const ExplorationState& st) {
  if (!guard_set(spec, init)) return false;
  return std::all_of(st.steps().begin(), st.steps().end(),
                     [&](const Step& s) { return guard_member(spec, s.event.body); });
}

bool ks_safe(const KeySet& ks, const ExplorationState& st) {
  return std::none_of(ks.begin(), ks.end(),
                      [&](KeyId k) { return st.analz().contains(Message::key(k)); });
}

void check_init(const GuardSpec& spec, const MessageSet& init) {
  if (auto bad = first_unguarded(spec, init))
    throw InitKnowledgeViolation("secret " + spec.secret.str() +
                                 " is not guarded in the spy's initial knowledge: " + bad->str());
}

class PreservationVisitor : public Visitor {
 public:
  PreservationVisitor(const Protocol& p, const SecrecyQuery& q, PreservationResult& result)
      : p_(p), q_(q), result_(result), init_(init_state(AgentId::spy(), p)) {
    for (const auto& r : p.rules()) {
      RuleVerdict v;
      v.rule = r.name();
      index_[r.name()] = result_.rules.size();
      result_.rules.push_back(std::move(v));
    }
  }

  bool on_state(const ExplorationState& st) override {
    std::vector<OriginInstance> active;
    for (auto& inst : origin_instances(st, p_, q_)) {
      GuardSpec spec{inst.secret, inst.ks};
      check_init(spec, init_);
      seen_.insert(std::make_pair(inst.secret, inst.position));
      bool safe_now = ks_safe(inst.ks, st);
      bool guarded = spies_guarded(spec, init_, st);
      if (safe_now && !guarded) ++result_.unguarded_safe_states;
      if (safe_now && guarded) active.push_back(std::move(inst));
    }
    stack_.push_back(std::move(active));
    return true;
  }

  bool wants_transitions() const override { return true; }

  bool on_transition(const ExplorationState& st, const Step& step) override {
    if (step.is_fake() || stack_.back().empty()) return true;
    RuleVerdict& verdict = result_.rules[index_.at(step.rule)];
    Trace after = st.trace();
    after.push_back(step.event);
    for (const auto& inst : stack_.back()) {
      KeySet ks = q_.ks.trace_dependent() ? q_.ks.resolve(inst.subst, after) : inst.ks;
      ++verdict.checks;
      if (guard_member(GuardSpec{inst.secret, ks}, step.event.body)) continue;
      if (verdict.outcome != RuleVerdict::Outcome::kViolated) {
        verdict.outcome = RuleVerdict::Outcome::kViolated;
        verdict.trace = st.steps();
        verdict.step = step;
        verdict.reason = "secret " + inst.secret.str() + " unguarded by " + render_key_set(ks);
      }
    }
    return true;
  }

  void on_leave(const ExplorationState& st) override {
    (void)st;
    stack_.pop_back();
  }

  std::size_t instances() const { return seen_.size(); }

 private:
  const Protocol& p_;
  const SecrecyQuery& q_;
  PreservationResult& result_;
  MessageSet init_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<OriginInstance>> stack_;
  std::set<std::pair<Secret, std::size_t>> seen_;
};

class SecrecyVisitor : public Visitor {
 public:
  SecrecyVisitor(const Protocol& p, const SecrecyQuery& q)
      : p_(p), q_(q), init_(init_state(AgentId::spy(), p)) {}

  bool on_state(const ExplorationState& st) override {
    for (const auto& inst : origin_instances(st, p_, q_)) {
      GuardSpec spec{inst.secret, inst.ks};
      check_init(spec, init_);
      seen_.insert(inst.secret);
      bool leaked = st.analz().contains(inst.secret.atom());
      if (!leaked) continue;
      if (spies_guarded(spec, init_, st) && ks_safe(inst.ks, st))
        throw Error("secrecy cross-check failed: guarded and safe but deducible");
      attack_ = st.steps();
      secret_ = inst.secret;
      return false;
    }
    return true;
  }

  const std::optional<std::vector<Step>>& attack() const { return attack_; }
  const std::optional<Secret>& secret() const { return secret_; }
  std::size_t instances() const { return seen_.size(); }

 private:
  const Protocol& p_;
  const SecrecyQuery& q_;
  MessageSet init_;
  std::optional<std::vector<Step>> attack_;
  std::optional<Secret> secret_;
  std::set<Secret> seen_;
};

}  // namespace

PreservationResult check_preservation(const Protocol& p, const SecrecyQuery& q,
                                      const ExplorationBounds& b) {
  PreservationResult result;
  PreservationVisitor v(p, q, result);
  result.report = explore(p, b, v);
  result.origin_instances = v.instances();
  bool violated = false;
  for (auto& r : result.rules) {
    if (r.outcome == RuleVerdict::Outcome::kViolated) {
      violated = true;
    } else if (result.report.truncated) {
      r.outcome = RuleVerdict::Outcome::kUnknown;
      r.reason = "state budget exhausted";
    }
  }
  if (violated) {
    result.global = RuleVerdict::Outcome::kViolated;
  } else if (result.report.truncated) {
    result.global = RuleVerdict::Outcome::kUnknown;
  }
  return result;
}

SecrecyResult check_secrecy(const Protocol& p, const SecrecyQuery& q, const ExplorationBounds& b) {
  SecrecyResult result;
  SecrecyVisitor v(p, q);
  result.report = explore(p, b, v);
  result.origin_instances = v.instances();
  if (v.attack()) {
    result.outcome = SecrecyResult::Outcome::kAttack;
    result.trace = *v.attack();
    result.secret = v.secret();
    // Depth-first search finds some attack; look for a shorter one.
    for (std::size_t len = 1; len < result.trace.size(); ++len) {
      ExplorationBounds shorter = b;
      shorter.max_trace_len = len;
      SecrecyVisitor w(p, q);
      explore(p, shorter, w);
      if (w.attack()) {
        result.trace = *w.attack();
        result.secret = w.secret();
        break;
      }
    }
  } else if (result.report.truncated) {
    result.outcome = SecrecyResult::Outcome::kUnknown;
    result.reason = "state budget exhausted after " + std::to_string(result.report.states) +
                    " states";
  }
  return result;
}

std::optional<Substitution> unicity_violation(const ExplorationState& st, const UnicityShape& shape,
                                              std::size_t* pairs_checked) {
  const MessageSet& ps = st.spied_parts();
  for (const auto& m1 : ps) {
    if (!m1.is_crypt() && shape.first.kind() == Pattern::Kind::kCrypt) continue;
    auto s1 = match(shape.first, m1);
    if (!s1) continue;
    for (const auto& m2 : ps) {
      auto s2 = match(shape.second, m2, *s1);
      if (!s2) continue;
      if (st.analz().contains(s2->at(shape.secret_var))) continue;
      if (pairs_checked != nullptr) ++*pairs_checked;
      bool agree = !shape.equalities.empty();
      for (const auto& [a, b] : shape.equalities) agree = agree && s2->at(a) == s2->at(b);
      if (!agree) return s2;
    }
  }
  return std::nullopt;
}

namespace {

class UnicityVisitor : public Visitor {
 public:
  UnicityVisitor(const UnicityShape& shape, UnicityResult& result) : shape_(shape), result_(result) {}

  bool on_state(const ExplorationState& st) override {
    auto bad = unicity_violation(st, shape_, &result_.pairs_checked);
    if (!bad) return true;
    result_.holds = false;
    result_.trace = st.steps();
    result_.bindings = bad;
    return false;
  }

 private:
  const UnicityShape& shape_;
  UnicityResult& result_;
};

}  // namespace

UnicityResult check_unicity(const Protocol& p, const UnicityShape& shape,
                            const ExplorationBounds& b) {
  UnicityResult result;
  UnicityVisitor v(shape, result);
  result.report = explore(p, b, v);
  result.truncated = result.report.truncated;
  return result;
}

}  // namespace protosec
