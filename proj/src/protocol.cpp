#include "protosec/protocol.hpp"

#include <algorithm>

#include "protosec/closure.hpp"
#include "protosec/msg_list.hpp"

namespace protosec {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

std::string Event::str() const {
  return "Says " + sender.str() + " " + recipient.str() + " " + body.str();
}

std::size_t Event::hash_value() const {
  std::size_t h = body.hash_value();
  h = mix(h, static_cast<std::size_t>(sender.code()));
  return mix(h, static_cast<std::size_t>(recipient.code()) * 31);
}

Event says(AgentId sender, AgentId recipient, const Message& body) {
  return Event{sender, recipient, body};
}

Event EventPattern::instantiate(const Substitution& s) const {
  return Event{apply_agent(s, sender), apply_agent(s, recipient), apm(s, body)};
}

namespace {

bool bind_agent(const AgentTerm& t, AgentId value, Substitution& s) {
  if (!t.is_var()) return t.agent() == value;
  return s.bind(t.var(), Message::agent(value));
}

void collect_agent_term(const AgentTerm& t, std::map<std::string, VarType>& out) {
  if (t.is_var()) out.emplace(t.var(), VarType::kAgent);
}

}  // namespace

std::optional<Substitution> EventPattern::match(const Event& e, const Substitution& s0) const {
  Substitution s = s0;
  if (!bind_agent(sender, e.sender, s) || !bind_agent(recipient, e.recipient, s)) return std::nullopt;
  return protosec::match(body, e.body, s);
}

void EventPattern::collect_vars(std::map<std::string, VarType>& out) const {
  collect_agent_term(sender, out);
  collect_agent_term(recipient, out);
  body.collect_vars(out);
}

std::string EventPattern::str(std::set<std::string>* declared) const {
  std::string out = "Says " + render_agent_term(sender, declared);
  out += " " + render_agent_term(recipient, declared);
  return out + " " + body.str(declared);
}

Condition Condition::in(Pattern var, std::vector<Message> values) {
  Condition c;
  c.kind = Kind::kIn;
  c.lhs = std::move(var);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  c.values = std::move(values);
  return c;
}

Condition Condition::equal(Pattern a, Pattern b) {
  Condition c;
  c.kind = Kind::kEqual;
  c.lhs = std::move(a);
  c.rhs = std::move(b);
  return c;
}

Condition Condition::not_equal(Pattern a, Pattern b) {
  Condition c = equal(std::move(a), std::move(b));
  c.kind = Kind::kNotEqual;
  return c;
}

Condition Condition::is_in(Pattern element, Pattern list) {
  Condition c = equal(std::move(element), std::move(list));
  c.kind = Kind::kIsIn;
  return c;
}

bool Condition::holds(const Substitution& s) const {
  try {
    switch (kind) {
      case Kind::kIn: {
        Message v = apm(s, lhs);
        return std::binary_search(values.begin(), values.end(), v);
      }
      case Kind::kEqual:
        return apm(s, lhs) == apm(s, rhs);
      case Kind::kNotEqual:
        return apm(s, lhs) != apm(s, rhs);
      case Kind::kIsIn:
        return msglist::isin(apm(s, lhs), apm(s, rhs));
    }
  } catch (const MalformedList&) {
    return false;
  }
  return false;
}

void Condition::collect_vars(std::map<std::string, VarType>& out) const {
  lhs.collect_vars(out);
  if (kind != Kind::kIn) rhs.collect_vars(out);
}

std::string Condition::str(std::set<std::string>* declared) const {
  switch (kind) {
    case Kind::kIn: {
      std::string out = lhs.str(declared) + " in {";
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) out += ", ";
        out += values[i].str();
      }
      return out + "}";
    }
    case Kind::kEqual:
      return lhs.str(declared) + " = " + rhs.str(declared);
    case Kind::kNotEqual:
      return lhs.str(declared) + " != " + rhs.str(declared);
    case Kind::kIsIn: {
      std::string element = lhs.str(declared);
      return "isin(" + element + ", " + rhs.str(declared) + ")";
    }
  }
  return "?";
}

Rule::Rule(std::string name, std::vector<EventPattern> pres, EventPattern post,
           std::vector<Condition> wheres)
    : name_(std::move(name)), pres_(std::move(pres)), post_(std::move(post)),
      wheres_(std::move(wheres)) {
  std::map<std::string, VarType> pre;
  for (const auto& e : pres_) e.collect_vars(pre);
  for (const auto& [v, t] : pre) pre_vars_.insert(v);
  vars_ = pre;
  post_.collect_vars(vars_);
  for (const auto& c : wheres_) c.collect_vars(vars_);
}

std::set<std::string> Rule::newn() const {
  std::map<std::string, VarType> post;
  post_.collect_vars(post);
  std::set<std::string> out;
  for (const auto& [v, t] : post)
    if (t == VarType::kNonce && pre_vars_.count(v) == 0) out.insert(v);
  return out;
}

std::set<std::string> Rule::newk() const {
  std::map<std::string, VarType> post;
  post_.collect_vars(post);
  std::set<std::string> out;
  for (const auto& [v, t] : post)
    if (t == VarType::kKey && pre_vars_.count(v) == 0) out.insert(v);
  return out;
}

bool Rule::wheres_hold(const Substitution& s) const {
  return std::all_of(wheres_.begin(), wheres_.end(), [&](const Condition& c) { return c.holds(s); });
}

bool operator==(const Rule& a, const Rule& b) {
  return a.name_ == b.name_ && a.pres_ == b.pres_ && a.post_ == b.post_ && a.wheres_ == b.wheres_;
}

DuplicateRuleName::DuplicateRuleName(const std::string& name)
    : Error("duplicate rule name " + name) {}

Protocol::Protocol(std::string name, std::vector<AgentId> agents, std::set<AgentId> bad,
                   std::vector<Rule> rules)
    : name_(std::move(name)), agents_(std::move(agents)), bad_(std::move(bad)) {
  for (auto& r : rules) add_rule(std::move(r));
}

const Rule* Protocol::find_rule(const std::string& name) const {
  for (const auto& r : rules_)
    if (r.name() == name) return &r;
  return nullptr;
}

const Rule& Protocol::rule(const std::string& name) const {
  if (const Rule* r = find_rule(name)) return *r;
  throw Error("unknown rule " + name);
}

void Protocol::add_rule(Rule r) {
  if (find_rule(r.name()) != nullptr) throw DuplicateRuleName(r.name());
  rules_.push_back(std::move(r));
}

MessageSet init_state(AgentId a, const Protocol& p) {
  MessageSet out;
  for (AgentId b : p.agents()) {
    out.insert(Message::agent(b));
    out.insert(Message::key(pub_key(b)));
  }
  out.insert(Message::agent(a));
  out.insert(Message::key(pub_key(a)));
  out.insert(Message::key(pri_key(a)));
  out.insert(Message::key(shr_key(a)));
  if (a.is_spy()) {
    for (AgentId b : p.bad()) {
      out.insert(Message::key(pri_key(b)));
      out.insert(Message::key(shr_key(b)));
    }
  }
  return out;
}

MessageSet spies(const Trace& evs, const Protocol& p) {
  MessageSet out = init_state(AgentId::spy(), p);
  for (const auto& e : evs) out.insert(e.body);
  return out;
}

MessageSet used(const Trace& evs, const Protocol& p) {
  MessageSet all = spies(evs, p);
  for (AgentId a : p.agents()) all.insert_all(init_state(a, p));
  return parts(all);
}

bool ok(const Trace& evs, const Rule& r, const Substitution& s, const Protocol& p) {
  std::set<Event> present(evs.begin(), evs.end());
  for (const auto& pre : r.pres())
    if (present.count(pre.instantiate(s)) == 0) return false;
  MessageSet u = used(evs, p);
  for (const auto& v : r.newn())
    if (u.contains(s.at(v))) return false;
  for (const auto& v : r.newk())
    if (u.contains(s.at(v))) return false;
  return r.wheres_hold(s);
}

bool fresh(const Rule& r, const Substitution& s, const Secret& n, const KeySet& ks,
           const Trace& evs) {
  std::set<std::string> news = n.is_nonce() ? r.newn() : r.newk();
  bool introduced = std::any_of(news.begin(), news.end(), [&](const std::string& v) {
    auto value = s.get(v);
    return value && *value == n.atom();
  });
  if (!introduced) return false;
  Event concl = r.post().instantiate(s);
  if (std::find(evs.begin(), evs.end(), concl) == evs.end()) return false;
  return guard_member(GuardSpec{n, ks}, concl.body);
}

bool safe(const KeySet& ks, const Trace& evs, const Protocol& p) {
  AnalzClosure known(spies(evs, p));
  return std::none_of(ks.begin(), ks.end(),
                      [&](KeyId k) { return known.contains(Message::key(k)); });
}

}  // namespace protosec
