#include "protosec/explore.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

#include "protosec/msg_list.hpp"

namespace protosec {

namespace {

uint64_t splitmix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct PairHash {
  std::size_t operator()(const std::pair<uint64_t, uint64_t>& k) const {
    return static_cast<std::size_t>(k.first ^ (k.second * 0x9e3779b97f4a7c15ULL));
  }
};

std::vector<Message> agent_lists(const std::vector<AgentId>& pool, std::size_t max_len) {
  std::vector<Message> out{msglist::nil()};
  std::vector<Message> frontier{msglist::nil()};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Message> next;
    for (const auto& tail : frontier)
      for (AgentId a : pool) next.push_back(msglist::cons(Message::agent(a), tail));
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Message> pool_values(VarType type, const ExplorationBounds& b) {
  std::vector<Message> out;
  switch (type) {
    case VarType::kAgent:
      for (AgentId a : b.agent_pool) out.push_back(Message::agent(a));
      break;
    case VarType::kNumber:
      for (uint64_t n : b.number_pool) out.push_back(Message::number(n));
      break;
    case VarType::kAgentList:
      out = agent_lists(b.agent_pool, b.max_list_len);
      break;
    default:
      break;
  }
  return out;
}

std::optional<std::string> single_var(const Pattern& x) {
  switch (x.kind()) {
    case Pattern::Kind::kVar:
      return x.var_name();
    case Pattern::Kind::kAgent:
      if (x.agent_term().is_var()) return x.agent_term().var();
      return std::nullopt;
    case Pattern::Kind::kNumber:
    case Pattern::Kind::kNonce:
      if (x.nat().is_var()) return x.nat().var();
      return std::nullopt;
    case Pattern::Kind::kKey:
      if (x.key_term().kind == KeyTerm::Kind::kVar) return x.key_term().var;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

// Candidate values of var in rule r, honouring `in` side conditions.
std::vector<Message> candidates(const Rule& r, const std::string& var, VarType type,
                                const ExplorationBounds& b) {
  std::vector<Message> values = pool_values(type, b);
  for (const auto& c : r.wheres()) {
    if (c.kind != Condition::Kind::kIn || single_var(c.lhs) != var) continue;
    if (type == VarType::kAgent) {
      std::erase_if(values, [&](const Message& m) {
        return !std::binary_search(c.values.begin(), c.values.end(), m);
      });
    } else {
      values = c.values;
    }
  }
  return values;
}

void cartesian(const std::vector<std::pair<std::string, std::vector<Message>>>& domains,
               std::size_t i, const Substitution& s,
               const std::function<void(const Substitution&)>& emit) {
  if (i == domains.size()) {
    emit(s);
    return;
  }
  for (const auto& v : domains[i].second) {
    Substitution next = s;
    if (next.bind(domains[i].first, v)) cartesian(domains, i + 1, next, emit);
  }
}

// Assignments of distinct unused values to the fresh variables.
void fresh_choices(const std::vector<std::string>& vars, const std::vector<Message>& pool,
                   const MessageSet& used, bool canonical, std::size_t i, Substitution& s,
                   std::set<Message>& taken, const std::function<void(const Substitution&)>& emit) {
  if (i == vars.size()) {
    emit(s);
    return;
  }
  for (const auto& v : pool) {
    if (used.contains(v) || taken.count(v) != 0) continue;
    Substitution next = s;
    next.bind(vars[i], v);
    taken.insert(v);
    fresh_choices(vars, pool, used, canonical, i + 1, next, taken, emit);
    taken.erase(v);
    if (canonical) return;
  }
}

}  // namespace

std::string Step::str() const {
  if (is_fake()) return "Fake: " + event.str();
  return rule + " " + subst.str() + ": " + event.str();
}

Trace trace_of(const std::vector<Step>& steps) {
  Trace out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.event);
  return out;
}

void ExplorationBounds::validate(const Protocol& p) const {
  if (agent_pool.empty()) throw BoundsTooSmall("agent pool is empty");
  // Only rules without preconditions can start a trace; if none of them can
  // be instantiated nothing ever happens.
  bool has_entry = std::any_of(p.rules().begin(), p.rules().end(),
                               [](const Rule& r) { return r.pres().empty(); });
  bool any = false;
  for (const auto& r : p.rules()) {
    if (has_entry && !r.pres().empty()) continue;
    bool fits = true;
    if (!r.newn().empty() && nonce_pool.size() < r.newn().size()) fits = false;
    if (!r.newk().empty() && session_key_pool.size() < r.newk().size()) fits = false;
    for (const auto& [v, t] : r.vars())
      if (t == VarType::kNumber && r.pre_vars().count(v) == 0 && number_pool.empty()) fits = false;
    any = any || fits;
  }
  if (!p.rules().empty() && !any) throw BoundsTooSmall("the pools cannot instantiate any rule");
}

ExplorationBounds ExplorationBounds::for_protocol(const Protocol& p, std::size_t max_len,
                                                  std::size_t agents,
                                                  std::size_t nonces_per_role) {
  ExplorationBounds b;
  b.max_trace_len = max_len;
  for (AgentId a : p.agents()) {
    if (a.is_spy()) continue;
    if (b.agent_pool.size() + 1 >= agents) break;
    b.agent_pool.push_back(a);
  }
  b.agent_pool.push_back(AgentId::spy());
  std::size_t nonce_vars = 0;
  std::size_t key_vars = 0;
  for (const auto& r : p.rules()) {
    nonce_vars += r.newn().size();
    key_vars += r.newk().size();
  }
  for (uint64_t i = 1; i <= nonce_vars * nonces_per_role; ++i) b.nonce_pool.push_back(i);
  for (uint64_t i = 1; i <= key_vars * nonces_per_role; ++i) b.session_key_pool.push_back(i);
  return b;
}

ExplorationState::ExplorationState(const Protocol& p) {
  MessageSet spy = init_state(AgentId::spy(), p);
  analz_ = AnalzClosure(spy);
  spied_parts_ = parts(spy);
  used_ = protosec::used(Trace{}, p);
}

bool ExplorationState::has_event(const Event& e) const {
  return std::any_of(steps_.begin(), steps_.end(), [&](const Step& s) { return s.event == e; });
}

std::pair<uint64_t, uint64_t> ExplorationState::key_with(const Event& e) const {
  uint64_t h = e.hash_value();
  return {key_.first + splitmix(h), key_.second ^ splitmix(h ^ 0x5bd1e9955bd1e995ULL)};
}

void ExplorationState::apply(const Step& step) {
  key_ = key_with(step.event);
  steps_.push_back(step);
  if (step.is_fake()) ++fakes_;
  analz_.add(step.event.body);
  MessageSet p = parts(MessageSet{step.event.body});
  spied_parts_.insert_all(p);
  used_.insert_all(p);
}

ExplorationState ExplorationState::after(const Step& step) const {
  ExplorationState next = *this;
  next.apply(step);
  return next;
}

std::vector<Substitution> enabled_instances(const ExplorationState& st, const Rule& r,
                                            const ExplorationBounds& b, const Protocol& p,
                                            const Event* reading) {
  (void)p;
  // Matches of the preconditions against the trace extended by `reading`;
  // the precondition at index `through` is matched against `reading` only.
  auto matches = [&](std::optional<std::size_t> through) {
    std::vector<Substitution> partial{Substitution{}};
    for (std::size_t i = 0; i < r.pres().size() && !partial.empty(); ++i) {
      const EventPattern& pre = r.pres()[i];
      std::vector<Substitution> next;
      for (const auto& s : partial) {
        if (through == i) {
          if (auto m = pre.match(*reading, s)) next.push_back(std::move(*m));
          continue;
        }
        for (const auto& step : st.steps())
          if (auto m = pre.match(step.event, s)) next.push_back(std::move(*m));
        if (reading != nullptr)
          if (auto m = pre.match(*reading, s)) next.push_back(std::move(*m));
      }
      partial = std::move(next);
    }
    return partial;
  };
  std::vector<Substitution> partial;
  if (reading == nullptr) {
    partial = matches(std::nullopt);
  } else {
    for (std::size_t i = 0; i < r.pres().size(); ++i) {
      auto more = matches(i);
      partial.insert(partial.end(), more.begin(), more.end());
    }
  }
  if (partial.empty()) return {};

  std::set<std::string> newn = r.newn();
  std::set<std::string> newk = r.newk();
  std::vector<Message> nonce_pool;
  for (uint64_t n : b.nonce_pool) nonce_pool.push_back(Message::nonce(n));
  std::vector<Message> key_pool;
  for (uint64_t i : b.session_key_pool) key_pool.push_back(Message::key(session_key(i)));

  std::set<Substitution> out;
  for (const auto& s : partial) {
    std::vector<std::pair<std::string, std::vector<Message>>> domains;
    bool feasible = true;
    for (const auto& [v, t] : r.vars()) {
      if (s.contains(v) || newn.count(v) != 0 || newk.count(v) != 0) continue;
      if (t == VarType::kNonce || t == VarType::kKey || t == VarType::kMsg) {
        feasible = false;
        break;
      }
      domains.emplace_back(v, candidates(r, v, t, b));
    }
    if (!feasible) continue;
    cartesian(domains, 0, s, [&](const Substitution& s1) {
      Substitution s2 = s1;
      std::set<Message> taken;
      std::vector<std::string> nv(newn.begin(), newn.end());
      fresh_choices(nv, nonce_pool, st.used(), b.canonical_fresh, 0, s2, taken,
                    [&](const Substitution& s3) {
                      Substitution s4 = s3;
                      std::set<Message> taken_keys;
                      std::vector<std::string> kv(newk.begin(), newk.end());
                      fresh_choices(kv, key_pool, st.used(), b.canonical_fresh, 0, s4, taken_keys,
                                    [&](const Substitution& s5) {
                                      if (!r.wheres_hold(s5)) return;
                                      try {
                                        r.post().instantiate(s5);
                                      } catch (const MalformedList&) {
                                        return;
                                      }
                                      out.insert(s5);
                                    });
                    });
    });
  }
  return {out.begin(), out.end()};
}

namespace {

ExplorationState state_of(const Trace& evs, const Protocol& p) {
  ExplorationState st(p);
  for (const auto& e : evs) st.apply(Step{e, e.sender.is_spy() ? "" : "?", {}});
  return st;
}

std::set<Event> fake_event_set(const ExplorationState& st, const Protocol& p,
                               const ExplorationBounds& b) {
  const MessageSet& known = st.analz().known();
  std::vector<Message> nonces;
  std::vector<Message> keys;
  std::vector<Message> numbers;
  for (uint64_t n : b.number_pool) numbers.push_back(Message::number(n));
  for (const auto& m : known) {
    if (m.kind() == Message::Kind::kNonce) nonces.push_back(m);
    if (m.kind() == Message::Kind::kKey) keys.push_back(m);
    if (m.kind() == Message::Kind::kNumber &&
        std::find(numbers.begin(), numbers.end(), m) == numbers.end())
      numbers.push_back(m);
  }
  std::vector<Message> everything(known.begin(), known.end());
  const Message spy = Message::agent(AgentId::spy());

  std::set<Event> events;
  std::set<std::pair<std::string, std::string>> seen_shapes;
  for (const auto& r : p.rules()) {
    for (const auto& pre : r.pres()) {
      if (!pre.sender.is_var() && !pre.sender.agent().is_spy()) continue;
      auto shape = std::make_pair(pre.str(), std::string());
      if (!seen_shapes.insert(shape).second) continue;

      std::map<std::string, VarType> vars;
      pre.body.collect_vars(vars);
      Substitution base;
      if (pre.sender.is_var() && vars.count(pre.sender.var()) != 0) base.bind(pre.sender.var(), spy);

      std::vector<std::pair<std::string, std::vector<Message>>> domains;
      for (const auto& [v, t] : vars) {
        if (base.contains(v)) continue;
        switch (t) {
          case VarType::kAgent:
          case VarType::kAgentList:
            domains.emplace_back(v, pool_values(t, b));
            break;
          case VarType::kNonce:
            domains.emplace_back(v, nonces);
            break;
          case VarType::kKey:
            domains.emplace_back(v, keys);
            break;
          case VarType::kNumber:
            domains.emplace_back(v, numbers);
            break;
          case VarType::kMsg:
            domains.emplace_back(v, everything);
            break;
        }
      }
      cartesian(domains, 0, base, [&](const Substitution& s) {
        Message x = Message::number(0);
        try {
          x = apm(s, pre.body);
        } catch (const MalformedList&) {
          return;
        }
        if (!synth_member(x, known)) return;
        auto add = [&](AgentId to) {
          if (to.is_spy()) return;
          Event e{AgentId::spy(), to, x};
          if (!st.has_event(e)) events.insert(e);
        };
        if (!pre.recipient.is_var()) {
          add(pre.recipient.agent());
        } else if (auto bound = s.get(pre.recipient.var())) {
          add(bound->agent_id());
        } else {
          for (AgentId a : b.agent_pool) add(a);
        }
      });
    }
  }
  return events;
}

}  // namespace

std::vector<Substitution> enabled_instances(const Trace& evs, const Rule& r,
                                            const ExplorationBounds& b, const Protocol& p) {
  return enabled_instances(state_of(evs, p), r, b, p);
}

std::vector<Event> fake_events(const ExplorationState& st, const Protocol& p,
                               const ExplorationBounds& b) {
  auto events = fake_event_set(st, p, b);
  return {events.begin(), events.end()};
}

MessageSet fake_messages(const ExplorationState& st, const Protocol& p, const ExplorationBounds& b) {
  MessageSet out;
  for (const auto& e : fake_event_set(st, p, b)) out.insert(e.body);
  return out;
}

MessageSet fake_messages(const Trace& evs, const Protocol& p, const ExplorationBounds& b) {
  return fake_messages(state_of(evs, p), p, b);
}

std::vector<Step> successors(const ExplorationState& st, const Protocol& p,
                             const ExplorationBounds& b, bool include_fakes,
                             const Event* reading) {
  std::vector<const Rule*> rules;
  for (const auto& r : p.rules()) rules.push_back(&r);
  std::sort(rules.begin(), rules.end(),
            [](const Rule* x, const Rule* y) { return x->name() < y->name(); });

  std::vector<Step> out;
  for (const Rule* r : rules) {
    for (auto& s : enabled_instances(st, *r, b, p, reading)) {
      Event e = r->post().instantiate(s);
      if (st.has_event(e) || (reading != nullptr && e == *reading)) continue;
      out.push_back(Step{e, r->name(), std::move(s)});
    }
  }
  if (include_fakes && st.fakes() < b.max_fakes) {
    for (auto& e : fake_events(st, p, b)) out.push_back(Step{std::move(e), "", {}});
  }
  return out;
}

namespace {

class Explorer {
 public:
  Explorer(const Protocol& p, const ExplorationBounds& b, Visitor& v) : p_(p), b_(b), v_(v) {}

  ExplorationReport run() {
    ExplorationState root(p_);
    visited_.insert(root.key());
    dfs(root);
    return report_;
  }

 private:
  void dfs(const ExplorationState& st) {
    ++report_.states;
    report_.longest = std::max(report_.longest, st.size());
    if (!v_.on_state(st)) {
      report_.stopped = true;
      return;
    }
    if (report_.states >= b_.max_states) {
      report_.truncated = true;
    } else {
      expand(st);
    }
    if (!report_.stopped) v_.on_leave(st);
  }

  void expand(const ExplorationState& st) {
    bool at_limit = st.size() >= b_.max_trace_len;
    if (at_limit && !v_.wants_transitions()) return;
    for (const auto& step : successors(st, p_, b_, false)) {
      if (!take(st, step, at_limit)) return;
    }
    if (st.size() + 1 >= b_.max_trace_len && !v_.wants_transitions()) return;
    if (at_limit || st.fakes() >= b_.max_fakes) return;
    // A fake step is only taken together with a rule step reading it.
    for (auto& e : fake_events(st, p_, b_)) {
      Step fake{std::move(e), "", {}};
      auto readers = successors(st, p_, b_, false, &fake.event);
      if (readers.empty()) continue;
      ExplorationState faked = st.after(fake);
      bool last = faked.size() >= b_.max_trace_len;
      for (const auto& step : readers) {
        if (!take(faked, step, last)) return;
      }
    }
  }

  // Reports the transition and explores its target; false once the search
  // must stop.
  bool take(const ExplorationState& st, const Step& step, bool at_limit) {
    ++report_.transitions;
    if (v_.wants_transitions() && !v_.on_transition(st, step)) {
      report_.stopped = true;
      return false;
    }
    if (at_limit) return true;
    if (!visited_.insert(st.key_with(step.event)).second) return true;
    dfs(st.after(step));
    return !report_.stopped && !report_.truncated;
  }

  const Protocol& p_;
  const ExplorationBounds& b_;
  Visitor& v_;
  ExplorationReport report_;
  std::unordered_set<std::pair<uint64_t, uint64_t>, PairHash> visited_;
};

}  // namespace

ExplorationReport explore(const Protocol& p, const ExplorationBounds& b, Visitor& v) {
  b.validate(p);
  return Explorer(p, b, v).run();
}

std::optional<std::string> replay_error(const Protocol& p, const std::vector<Step>& steps) {
  Trace prefix;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Step& step = steps[i];
    std::string where = "step " + std::to_string(i + 1) + " (" + step.event.str() + "): ";
    if (step.is_fake()) {
      if (!step.event.sender.is_spy()) return where + "fake event not sent by the spy";
      if (!synth_member(step.event.body, analz(spies(prefix, p))))
        return where + "body not in synth(analz(spies evs))";
    } else {
      const Rule* r = p.find_rule(step.rule);
      if (r == nullptr) return where + "unknown rule " + step.rule;
      for (const auto& [v, t] : r->vars()) {
        auto value = step.subst.get(v);
        if (!value) return where + "variable $" + v + " unbound";
        if (!value_has_type(*value, t)) return where + "variable $" + v + " ill-typed";
      }
      try {
        if (r->post().instantiate(step.subst) != step.event)
          return where + "event is not the rule's conclusion";
        if (!ok(prefix, *r, step.subst, p)) return where + "rule " + r->name() + " not enabled";
      } catch (const Error& e) {
        return where + e.what();
      }
    }
    prefix.push_back(step.event);
  }
  return std::nullopt;
}

}  // namespace protosec
