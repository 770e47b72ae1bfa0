#include "protosec/pattern.hpp"

#include <algorithm>
#include <cassert>

#include "protosec/message_io.hpp"
#include "protosec/msg_list.hpp"

namespace protosec {

std::string_view var_type_name(VarType type) {
  switch (type) {
    case VarType::kAgent:
      return "agent";
    case VarType::kNonce:
      return "nonce";
    case VarType::kKey:
      return "key";
    case VarType::kNumber:
      return "number";
    case VarType::kMsg:
      return "msg";
    case VarType::kAgentList:
      return "agents";
  }
  return "?";
}

std::optional<VarType> var_type_from_name(std::string_view name) {
  for (VarType t : {VarType::kAgent, VarType::kNonce, VarType::kKey, VarType::kNumber,
                    VarType::kMsg, VarType::kAgentList}) {
    if (var_type_name(t) == name) return t;
  }
  return std::nullopt;
}

bool value_has_type(const Message& value, VarType type) {
  switch (type) {
    case VarType::kAgent:
      return value.kind() == Message::Kind::kAgent;
    case VarType::kNonce:
      return value.kind() == Message::Kind::kNonce;
    case VarType::kKey:
      return value.kind() == Message::Kind::kKey;
    case VarType::kNumber:
      return value.kind() == Message::Kind::kNumber;
    case VarType::kMsg:
      return true;
    case VarType::kAgentList:
      return msglist::is_agent_list(value);
  }
  return false;
}

UnboundVariable::UnboundVariable(const std::string& name)
    : Error("unbound variable $" + name), name_(name) {}

namespace {

auto find_entry(const std::vector<std::pair<std::string, Message>>& entries,
                std::string_view name) {
  return std::lower_bound(entries.begin(), entries.end(), name,
                          [](const auto& e, std::string_view n) { return e.first < n; });
}

}  // namespace

std::optional<Message> Substitution::get(std::string_view name) const {
  auto it = find_entry(entries_, name);
  if (it != entries_.end() && it->first == name) return it->second;
  return std::nullopt;
}

bool Substitution::bind(const std::string& name, const Message& value) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const auto& e, const std::string& n) { return e.first < n; });
  if (it != entries_.end() && it->first == name) return it->second == value;
  entries_.insert(it, {name, value});
  return true;
}

Message Substitution::at(std::string_view name) const {
  auto v = get(name);
  if (!v) throw UnboundVariable(std::string(name));
  return *v;
}

Substitution Substitution::restricted(const std::set<std::string>& names) const {
  Substitution out;
  for (const auto& [k, v] : entries_)
    if (names.count(k) != 0) out.entries_.emplace_back(k, v);
  return out;
}

bool Substitution::extends(const Substitution& smaller) const {
  for (const auto& [k, v] : smaller.entries_) {
    auto mine = get(k);
    if (!mine || *mine != v) return false;
  }
  return true;
}

std::string Substitution::str() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : entries_) {
    if (!first) out += ", ";
    first = false;
    out += k + " -> " + v.str();
  }
  return out + "}";
}

struct Pattern::Node {
  Kind kind;
  NatTerm nat;
  AgentTerm agent;
  KeyTerm key;
  std::vector<Pattern> children;
  std::string name;  // variable or function name
  VarType var_type = VarType::kMsg;
  bool ground = true;
  bool matchable = true;
};

namespace {

template <class... Children>
void inherit_flags(bool& ground, bool& matchable, const Children&... children) {
  ((ground = ground && children.is_ground(), matchable = matchable && children.is_matchable()),
   ...);
}

}  // namespace

Pattern Pattern::number(NatTerm n) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kNumber;
  node->ground = !n.is_var();
  node->nat = std::move(n);
  return Pattern(node);
}

Pattern Pattern::nonce(NatTerm n) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kNonce;
  node->ground = !n.is_var();
  node->nat = std::move(n);
  return Pattern(node);
}

Pattern Pattern::agent(AgentTerm a) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kAgent;
  node->ground = !a.is_var();
  node->agent = std::move(a);
  return Pattern(node);
}

namespace {

bool key_term_ground(const KeyTerm& k) {
  switch (k.kind) {
    case KeyTerm::Kind::kConst:
      return true;
    case KeyTerm::Kind::kVar:
      return false;
    default:
      return !k.agent.is_var();
  }
}

}  // namespace

Pattern Pattern::key(KeyTerm k) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kKey;
  node->ground = key_term_ground(k);
  node->key = std::move(k);
  return Pattern(node);
}

Pattern Pattern::hash(Pattern body) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kHash;
  inherit_flags(node->ground, node->matchable, body);
  node->children = {std::move(body)};
  return Pattern(node);
}

Pattern Pattern::pair(Pattern first, Pattern second) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kPair;
  inherit_flags(node->ground, node->matchable, first, second);
  node->children = {std::move(first), std::move(second)};
  return Pattern(node);
}

Pattern Pattern::tuple(const std::vector<Pattern>& items) {
  if (items.empty()) throw Error("Pattern::tuple requires at least one element");
  Pattern acc = items.back();
  for (auto it = items.rbegin() + 1; it != items.rend(); ++it) acc = pair(*it, acc);
  return acc;
}

Pattern Pattern::crypt(KeyTerm key, Pattern body) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kCrypt;
  node->ground = key_term_ground(key);
  inherit_flags(node->ground, node->matchable, body);
  node->key = std::move(key);
  node->children = {std::move(body)};
  return Pattern(node);
}

Pattern Pattern::var(std::string name, VarType type) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kVar;
  node->name = std::move(name);
  node->var_type = type;
  node->ground = false;
  return Pattern(node);
}

Pattern Pattern::func(std::string name, std::vector<Pattern> args) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kFunc;
  node->name = std::move(name);
  node->ground = false;
  node->matchable = false;
  node->children = std::move(args);
  return Pattern(node);
}

Pattern Pattern::ground(const Message& m) {
  switch (m.kind()) {
    case Message::Kind::kNumber:
      return number(NatTerm{m.value()});
    case Message::Kind::kNonce:
      return nonce(NatTerm{m.value()});
    case Message::Kind::kAgent:
      return agent(AgentTerm{m.agent_id()});
    case Message::Kind::kKey:
      return key(KeyTerm::of(m.key_id()));
    case Message::Kind::kHash:
      return hash(ground(m.body()));
    case Message::Kind::kPair:
      return pair(ground(m.first()), ground(m.second()));
    case Message::Kind::kCrypt:
      return crypt(KeyTerm::of(m.key_id()), ground(m.body()));
  }
  throw Error("unreachable");
}

Pattern::Kind Pattern::kind() const { return node_->kind; }
const NatTerm& Pattern::nat() const { return node_->nat; }
const AgentTerm& Pattern::agent_term() const { return node_->agent; }
const KeyTerm& Pattern::key_term() const { return node_->key; }
const Pattern& Pattern::body() const { return node_->children.at(0); }
const Pattern& Pattern::first() const { return node_->children.at(0); }
const Pattern& Pattern::second() const { return node_->children.at(1); }
const std::string& Pattern::var_name() const { return node_->name; }
VarType Pattern::var_type() const { return node_->var_type; }
const std::string& Pattern::func_name() const { return node_->name; }
const std::vector<Pattern>& Pattern::args() const { return node_->children; }
bool Pattern::is_ground() const { return node_->ground; }
bool Pattern::is_matchable() const { return node_->matchable; }

std::optional<Message> Pattern::as_message() const {
  if (!is_ground()) return std::nullopt;
  return apm(Substitution{}, *this);
}

std::map<std::string, VarType> Pattern::vars() const {
  std::map<std::string, VarType> out;
  collect_vars(out);
  return out;
}

namespace {

void collect_agent(const AgentTerm& a, std::map<std::string, VarType>& out) {
  if (a.is_var()) out.emplace(a.var(), VarType::kAgent);
}

void collect_key(const KeyTerm& k, std::map<std::string, VarType>& out) {
  if (k.kind == KeyTerm::Kind::kVar) {
    out.emplace(k.var, VarType::kKey);
  } else if (k.kind != KeyTerm::Kind::kConst) {
    collect_agent(k.agent, out);
  }
}

}  // namespace

void Pattern::collect_vars(std::map<std::string, VarType>& out) const {
  switch (kind()) {
    case Kind::kNumber:
      if (nat().is_var()) out.emplace(nat().var(), VarType::kNumber);
      return;
    case Kind::kNonce:
      if (nat().is_var()) out.emplace(nat().var(), VarType::kNonce);
      return;
    case Kind::kAgent:
      collect_agent(agent_term(), out);
      return;
    case Kind::kKey:
      collect_key(key_term(), out);
      return;
    case Kind::kCrypt:
      collect_key(key_term(), out);
      body().collect_vars(out);
      return;
    case Kind::kVar:
      out.emplace(var_name(), var_type());
      return;
    case Kind::kHash:
    case Kind::kPair:
    case Kind::kFunc:
      for (const auto& c : node_->children) c.collect_vars(out);
      return;
  }
}

namespace {

std::string render_var(const std::string& name, VarType type, std::set<std::string>* declared) {
  std::string out = "$" + name;
  if (declared != nullptr && declared->insert(name).second) {
    out += ":";
    out += var_type_name(type);
  }
  return out;
}

std::string render_nat(const NatTerm& n, VarType type, std::set<std::string>* declared) {
  if (n.is_var()) return render_var(n.var(), type, declared);
  return std::to_string(n.constant());
}

}  // namespace

std::string render_agent_term(const AgentTerm& a, std::set<std::string>* declared) {
  if (a.is_var()) return render_var(a.var(), VarType::kAgent, declared);
  return a.agent().str();
}

std::string render_key_term(const KeyTerm& k, std::set<std::string>* declared) {
  switch (k.kind) {
    case KeyTerm::Kind::kConst:
      return std::to_string(k.constant.value());
    case KeyTerm::Kind::kVar:
      return render_var(k.var, VarType::kKey, declared);
    case KeyTerm::Kind::kPub:
      return "pubK(" + render_agent_term(k.agent, declared) + ")";
    case KeyTerm::Kind::kPri:
      return "priK(" + render_agent_term(k.agent, declared) + ")";
    case KeyTerm::Kind::kShr:
      return "shrK(" + render_agent_term(k.agent, declared) + ")";
  }
  return "?";
}

std::string Pattern::str(std::set<std::string>* declared) const {
  switch (kind()) {
    case Kind::kNumber:
      return "Number " + render_nat(nat(), VarType::kNumber, declared);
    case Kind::kNonce:
      return "Nonce " + render_nat(nat(), VarType::kNonce, declared);
    case Kind::kAgent:
      return "Agent " + render_agent_term(agent_term(), declared);
    case Kind::kKey:
      return "Key " + render_key_term(key_term(), declared);
    case Kind::kHash:
      return "Hash{" + body().str(declared) + "}";
    case Kind::kPair: {
      std::string out = "{" + first().str(declared);
      const Pattern* cur = &second();
      while (cur->kind() == Kind::kPair) {
        out += ", " + cur->first().str(declared);
        cur = &cur->second();
      }
      return out + ", " + cur->str(declared) + "}";
    }
    case Kind::kCrypt: {
      std::string k = render_key_term(key_term(), declared);
      return "Crypt(" + k + "){" + body().str(declared) + "}";
    }
    case Kind::kVar:
      return render_var(var_name(), var_type(), declared);
    case Kind::kFunc: {
      std::string out = func_name() + "(";
      for (std::size_t i = 0; i < args().size(); ++i) {
        if (i != 0) out += ", ";
        out += args()[i].str(declared);
      }
      return out + ")";
    }
  }
  return "?";
}

bool operator==(const Pattern& a, const Pattern& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Pattern::Kind::kNumber:
    case Pattern::Kind::kNonce:
      return x.nat == y.nat;
    case Pattern::Kind::kAgent:
      return x.agent == y.agent;
    case Pattern::Kind::kKey:
      return x.key == y.key;
    case Pattern::Kind::kCrypt:
      return x.key == y.key && x.children == y.children;
    case Pattern::Kind::kVar:
      return x.name == y.name && x.var_type == y.var_type;
    case Pattern::Kind::kFunc:
      return x.name == y.name && x.children == y.children;
    case Pattern::Kind::kHash:
    case Pattern::Kind::kPair:
      return x.children == y.children;
  }
  return false;
}

AgentId apply_agent(const Substitution& s, const AgentTerm& a) {
  if (!a.is_var()) return a.agent();
  Message v = s.at(a.var());
  if (v.kind() != Message::Kind::kAgent) throw Error("variable $" + a.var() + " is not an agent");
  return v.agent_id();
}

KeyId apply_key(const Substitution& s, const KeyTerm& k) {
  switch (k.kind) {
    case KeyTerm::Kind::kConst:
      return k.constant;
    case KeyTerm::Kind::kVar: {
      Message v = s.at(k.var);
      if (v.kind() != Message::Kind::kKey) throw Error("variable $" + k.var + " is not a key");
      return v.key_id();
    }
    case KeyTerm::Kind::kPub:
      return pub_key(apply_agent(s, k.agent));
    case KeyTerm::Kind::kPri:
      return pri_key(apply_agent(s, k.agent));
    case KeyTerm::Kind::kShr:
      return shr_key(apply_agent(s, k.agent));
  }
  throw Error("unreachable");
}

namespace {

uint64_t apply_nat(const Substitution& s, const NatTerm& n) {
  if (!n.is_var()) return n.constant();
  Message v = s.at(n.var());
  if (v.kind() != Message::Kind::kNumber && v.kind() != Message::Kind::kNonce)
    throw Error("variable $" + n.var() + " is not a natural");
  return v.value();
}

Message eval_func(const std::string& name, const std::vector<Message>& args) {
  if (name == "app" && args.size() == 2) return msglist::app(args[0], args[1]);
  if (name == "del" && args.size() == 2) return msglist::del(args[0], args[1]);
  if (name == "head" && args.size() == 1) return msglist::head(args[0]);
  throw Error("unknown function " + name + "/" + std::to_string(args.size()));
}

}  // namespace

Message apm(const Substitution& s, const Pattern& x) {
  switch (x.kind()) {
    case Pattern::Kind::kNumber:
      return Message::number(apply_nat(s, x.nat()));
    case Pattern::Kind::kNonce:
      return Message::nonce(apply_nat(s, x.nat()));
    case Pattern::Kind::kAgent:
      return Message::agent(apply_agent(s, x.agent_term()));
    case Pattern::Kind::kKey:
      return Message::key(apply_key(s, x.key_term()));
    case Pattern::Kind::kHash:
      return Message::hash(apm(s, x.body()));
    case Pattern::Kind::kPair:
      return Message::pair(apm(s, x.first()), apm(s, x.second()));
    case Pattern::Kind::kCrypt:
      return Message::crypt(apply_key(s, x.key_term()), apm(s, x.body()));
    case Pattern::Kind::kVar:
      return s.at(x.var_name());
    case Pattern::Kind::kFunc: {
      std::vector<Message> args;
      for (const auto& a : x.args()) args.push_back(apm(s, a));
      return eval_func(x.func_name(), args);
    }
  }
  throw Error("unreachable");
}

namespace {

bool match_agent(const AgentTerm& a, AgentId value, Substitution& s) {
  if (!a.is_var()) return a.agent() == value;
  return s.bind(a.var(), Message::agent(value));
}

bool match_key(const KeyTerm& k, KeyId value, Substitution& s) {
  switch (k.kind) {
    case KeyTerm::Kind::kConst:
      return k.constant == value;
    case KeyTerm::Kind::kVar:
      return s.bind(k.var, Message::key(value));
    case KeyTerm::Kind::kPub:
    case KeyTerm::Kind::kPri:
    case KeyTerm::Kind::kShr: {
      KeyKind want = k.kind == KeyTerm::Kind::kPub   ? KeyKind::kPublic
                     : k.kind == KeyTerm::Kind::kPri ? KeyKind::kPrivate
                                                     : KeyKind::kShared;
      if (key_kind(value) != want) return false;
      return match_agent(k.agent, *key_owner(value), s);
    }
  }
  return false;
}

bool match_nat(const NatTerm& n, const Message& value, Substitution& s) {
  if (!n.is_var()) return n.constant() == value.value();
  return s.bind(n.var(), value);
}

bool match_into(const Pattern& x, const Message& m, Substitution& s) {
  switch (x.kind()) {
    case Pattern::Kind::kNumber:
      return m.kind() == Message::Kind::kNumber && match_nat(x.nat(), m, s);
    case Pattern::Kind::kNonce:
      return m.kind() == Message::Kind::kNonce && match_nat(x.nat(), m, s);
    case Pattern::Kind::kAgent:
      return m.kind() == Message::Kind::kAgent && match_agent(x.agent_term(), m.agent_id(), s);
    case Pattern::Kind::kKey:
      return m.kind() == Message::Kind::kKey && match_key(x.key_term(), m.key_id(), s);
    case Pattern::Kind::kHash:
      return m.kind() == Message::Kind::kHash && match_into(x.body(), m.body(), s);
    case Pattern::Kind::kPair:
      return m.is_pair() && match_into(x.first(), m.first(), s) &&
             match_into(x.second(), m.second(), s);
    case Pattern::Kind::kCrypt:
      return m.is_crypt() && match_key(x.key_term(), m.key_id(), s) &&
             match_into(x.body(), m.body(), s);
    case Pattern::Kind::kVar:
      return value_has_type(m, x.var_type()) && s.bind(x.var_name(), m);
    case Pattern::Kind::kFunc:
      try {
        return apm(s, x) == m;
      } catch (const UnboundVariable&) {
        return false;
      } catch (const MalformedList&) {
        return false;
      }
  }
  return false;
}

}  // namespace

std::optional<Substitution> match(const Pattern& x, const Message& m, const Substitution& s0) {
  Substitution s = s0;
  if (!match_into(x, m, s)) return std::nullopt;
  return s;
}

}  // namespace protosec
