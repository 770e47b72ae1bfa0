#include "protosec/dsl.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "protosec/agent_chain.hpp"
#include "protosec/msg_list.hpp"

namespace protosec {

TypeError::TypeError(const std::string& variable, VarType expected, VarType found,
                     std::size_t line, std::size_t column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": variable $" + variable +
            " used as " + std::string(var_type_name(found)) + " but has type " +
            std::string(var_type_name(expected))),
      variable_(variable),
      expected_(expected),
      found_(found) {}

const SecrecyQuery& ProtocolFile::query(const std::string& name) const {
  for (const auto& q : queries)
    if (q.name == name) return q;
  throw Error("no secrecy query named " + name);
}

const UnicityShape& ProtocolFile::shape(const std::string& name) const {
  for (const auto& u : unicity)
    if (u.name == name) return u;
  throw Error("no unicity shape named " + name);
}

ExplorationBounds ProtocolFile::exploration_bounds() const {
  std::size_t honest = std::count_if(protocol.agents().begin(), protocol.agents().end(),
                                     [](AgentId a) { return !a.is_spy(); });
  ExplorationBounds b = ExplorationBounds::for_protocol(
      protocol, bounds.max_len.value_or(4), bounds.agents.value_or(honest + 1),
      bounds.nonces.value_or(1));
  if (bounds.fakes) b.max_fakes = *bounds.fakes;
  if (bounds.lists) b.max_list_len = *bounds.lists;
  if (bounds.states) b.max_states = *bounds.states;
  return b;
}

namespace {

using Scope = std::map<std::string, VarType>;

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  ProtocolFile file();
  Pattern standalone_pattern() {
    Scope scope;
    Pattern p = pattern(scope);
    if (!lex_.at_end()) lex_.fail("trailing input after pattern");
    return p;
  }

 private:
  Lexer lex_;
  std::vector<Rule> rules_;

  // Records the type of a variable occurrence, honouring an optional
  // `:type` annotation.
  std::string typed_var(Scope& scope, VarType type) {
    Token tok = lex_.next();
    if (tok.kind != Token::Kind::kVar) lex_.fail_at(tok, "expected variable");
    if (lex_.accept_punct(":")) {
      Token t = lex_.next();
      auto annotated = var_type_from_name(t.text);
      if (t.kind != Token::Kind::kIdent || !annotated) lex_.fail_at(t, "unknown variable type");
      if (*annotated != type) throw TypeError(tok.text, type, *annotated, t.line, t.column);
    }
    declare(scope, tok, type);
    return tok.text;
  }

  void declare(Scope& scope, const Token& tok, VarType type) {
    auto [it, inserted] = scope.emplace(tok.text, type);
    if (!inserted && it->second != type)
      throw TypeError(tok.text, it->second, type, tok.line, tok.column);
  }

  AgentTerm agent_term(Scope& scope) {
    if (lex_.peek().kind == Token::Kind::kVar) return AgentTerm{typed_var(scope, VarType::kAgent)};
    return AgentTerm{parse_agent(lex_)};
  }

  // Agent argument of a macro: `Agent t` or a bare agent term.
  AgentTerm agent_arg(Scope& scope) {
    lex_.accept_ident("Agent");
    return agent_term(scope);
  }

  NatTerm nat_term(Scope& scope, VarType type) {
    if (lex_.peek().kind == Token::Kind::kVar) return NatTerm{typed_var(scope, type)};
    return NatTerm{lex_.expect_natural()};
  }

  KeyTerm key_term(Scope& scope) {
    if (lex_.peek().kind == Token::Kind::kVar) return KeyTerm::variable(typed_var(scope, VarType::kKey));
    auto derived = [&](KeyTerm::Kind kind) {
      bool paren = lex_.accept_punct("(");
      AgentTerm a = agent_term(scope);
      if (paren) lex_.expect_punct(")");
      return KeyTerm::derived(kind, std::move(a));
    };
    if (lex_.accept_ident("pubK")) return derived(KeyTerm::Kind::kPub);
    if (lex_.accept_ident("priK")) return derived(KeyTerm::Kind::kPri);
    if (lex_.accept_ident("shrK")) return derived(KeyTerm::Kind::kShr);
    return KeyTerm::of(parse_key(lex_));
  }

  std::vector<Pattern> args(Scope& scope, std::size_t n, const std::string& name) {
    std::vector<Pattern> out;
    lex_.expect_punct("(");
    for (std::size_t i = 0; i < n; ++i) {
      if (i != 0) lex_.expect_punct(",");
      out.push_back(pattern(scope));
    }
    if (!lex_.accept_punct(")")) lex_.fail(name + " takes " + std::to_string(n) + " arguments");
    return out;
  }

  Pattern chain_macro(Scope& scope, ChainVariant v) {
    lex_.expect_punct("(");
    AgentTerm b = agent_arg(scope);
    lex_.expect_punct(",");
    Pattern ofr = pattern(scope);
    lex_.expect_punct(",");
    AgentTerm a = agent_arg(scope);
    lex_.expect_punct(",");
    Pattern l = pattern(scope);
    lex_.expect_punct(",");
    AgentTerm c = agent_arg(scope);
    lex_.expect_punct(")");
    return chain_pattern(v, b, ofr, a, l, c);
  }

  Pattern anchor_macro(Scope& scope, ChainVariant v) {
    lex_.expect_punct("(");
    AgentTerm a = agent_arg(scope);
    lex_.expect_punct(",");
    Pattern n = pattern(scope);
    lex_.expect_punct(",");
    AgentTerm b = agent_arg(scope);
    lex_.expect_punct(")");
    return anchor_pattern(v, a, n, b);
  }

  // `{X}` or `{X, Y, ...}`; Hash and Crypt bodies may omit the inner braces
  // of a tuple.
  Pattern braced(Scope& scope) {
    lex_.expect_punct("{");
    std::vector<Pattern> items{pattern(scope)};
    while (lex_.accept_punct(",")) items.push_back(pattern(scope));
    lex_.expect_punct("}");
    return items.size() == 1 ? items.front() : Pattern::tuple(items);
  }

  Pattern pattern(Scope& scope) {
    const Token& tok = lex_.peek();
    if (tok.kind == Token::Kind::kVar) {
      Token var = lex_.next();
      VarType type = VarType::kMsg;
      if (lex_.accept_punct(":")) {
        Token t = lex_.next();
        auto annotated = var_type_from_name(t.text);
        if (t.kind != Token::Kind::kIdent || !annotated) lex_.fail_at(t, "unknown variable type");
        type = *annotated;
      } else if (auto it = scope.find(var.text); it != scope.end()) {
        type = it->second;
      }
      declare(scope, var, type);
      return Pattern::var(var.text, type);
    }
    if (tok.kind == Token::Kind::kPunct && tok.text == "{") {
      Pattern p = braced(scope);
      if (p.kind() != Pattern::Kind::kPair) lex_.fail("a pair needs at least two components");
      return p;
    }
    if (tok.kind != Token::Kind::kIdent) lex_.fail("expected pattern");
    std::string word = lex_.next().text;
    if (word == "Number") return Pattern::number(nat_term(scope, VarType::kNumber));
    if (word == "Nonce") return Pattern::nonce(nat_term(scope, VarType::kNonce));
    if (word == "Agent") return Pattern::agent(agent_term(scope));
    if (word == "Key") return Pattern::key(key_term(scope));
    if (word == "Hash") {
      return Pattern::hash(braced(scope));
    }
    if (word == "Crypt") {
      lex_.expect_punct("(");
      KeyTerm k = key_term(scope);
      lex_.expect_punct(")");
      return Pattern::crypt(std::move(k), braced(scope));
    }
    if (word == "nil") return Pattern::ground(msglist::nil());
    if (word == "cons") {
      auto a = args(scope, 2, word);
      return Pattern::pair(a[0], a[1]);
    }
    if (word == "head") return Pattern::func(word, args(scope, 1, word));
    if (word == "app" || word == "del") return Pattern::func(word, args(scope, 2, word));
    if (word == "sign") {
      lex_.expect_punct("(");
      AgentTerm b = agent_arg(scope);
      lex_.expect_punct(",");
      Pattern x = pattern(scope);
      lex_.expect_punct(")");
      return sign_pattern(b, x);
    }
    if (word == "chain1") return chain_macro(scope, ChainVariant::kP1);
    if (word == "chain2") return chain_macro(scope, ChainVariant::kP2);
    if (word == "anchor1") return anchor_macro(scope, ChainVariant::kP1);
    if (word == "anchor2") return anchor_macro(scope, ChainVariant::kP2);
    lex_.fail("expected pattern");
  }

  EventPattern event(Scope& scope) {
    lex_.expect_ident("Says");
    AgentTerm sender = agent_term(scope);
    AgentTerm recipient = agent_term(scope);
    Pattern body = pattern(scope);
    return EventPattern{std::move(sender), std::move(recipient), std::move(body)};
  }

  std::vector<Message> message_set() {
    std::vector<Message> out;
    lex_.expect_punct("{");
    if (lex_.accept_punct("}")) return out;
    out.push_back(parse_message(lex_));
    while (lex_.accept_punct(",")) out.push_back(parse_message(lex_));
    lex_.expect_punct("}");
    return out;
  }

  Condition condition(Scope& scope) {
    if (lex_.accept_ident("isin")) {
      auto a = args(scope, 2, "isin");
      return Condition::is_in(a[0], a[1]);
    }
    Pattern lhs = pattern(scope);
    if (lex_.accept_punct("=")) return Condition::equal(lhs, pattern(scope));
    if (lex_.accept_punct("!=")) return Condition::not_equal(lhs, pattern(scope));
    if (lex_.accept_ident("in")) return Condition::in(lhs, message_set());
    lex_.fail("expected '=', '!=' or 'in'");
  }

  Rule rule() {
    std::string name = lex_.expect_identifier();
    lex_.expect_punct("{");
    Scope scope;
    std::vector<EventPattern> pres;
    while (lex_.accept_ident("pre")) {
      lex_.expect_punct(":");
      pres.push_back(event(scope));
      lex_.expect_punct(";");
    }
    Token post_tok = lex_.peek();
    lex_.expect_ident("post");
    lex_.expect_punct(":");
    EventPattern post = event(scope);
    lex_.expect_punct(";");
    std::vector<Condition> wheres;
    if (lex_.accept_ident("where")) {
      lex_.expect_punct(":");
      wheres.push_back(condition(scope));
      while (lex_.accept_punct(",")) wheres.push_back(condition(scope));
      lex_.expect_punct(";");
    }
    lex_.expect_punct("}");
    Rule r(name, std::move(pres), std::move(post), std::move(wheres));
    for (const auto& [v, t] : r.vars()) {
      if (t == VarType::kMsg && r.pre_vars().count(v) == 0)
        lex_.fail_at(post_tok, "message variable $" + v + " of rule " + name +
                                   " is not bound by a precondition");
    }
    if (std::any_of(rules_.begin(), rules_.end(),
                    [&](const Rule& other) { return other.name() == name; }))
      throw DuplicateRuleName(name);
    return r;
  }

  SecrecyQuery secret() {
    SecrecyQuery q;
    Token var = lex_.next();
    if (var.kind != Token::Kind::kVar) lex_.fail_at(var, "expected secret variable");
    q.secret_var = var.text;
    lex_.expect_ident("of");
    Token rule_tok = lex_.peek();
    q.origin_rule = lex_.expect_identifier();
    auto it = std::find_if(rules_.begin(), rules_.end(),
                           [&](const Rule& r) { return r.name() == q.origin_rule; });
    if (it == rules_.end()) lex_.fail_at(rule_tok, "unknown rule " + q.origin_rule);
    if (it->newn().count(q.secret_var) == 0 && it->newk().count(q.secret_var) == 0)
      lex_.fail_at(var, "$" + var.text + " is not a fresh nonce or key of " + q.origin_rule);
    Scope scope = it->vars();
    lex_.expect_ident("guardedby");
    lex_.expect_punct("{");
    if (!lex_.accept_punct("}")) {
      q.ks.fixed.push_back(key_term(scope));
      while (lex_.accept_punct(",")) q.ks.fixed.push_back(key_term(scope));
      lex_.expect_punct("}");
    }
    while (lex_.accept_punct("+")) {
      lex_.expect_ident("keys");
      Token k = lex_.next();
      if (k.kind != Token::Kind::kVar) lex_.fail_at(k, "expected key variable");
      lex_.expect_ident("from");
      EventPattern e = event(scope);
      auto kt = scope.find(k.text);
      if (kt == scope.end() || kt->second != VarType::kKey)
        lex_.fail_at(k, "$" + k.text + " must occur as a key in the event pattern");
      q.ks.from_trace.push_back({k.text, std::move(e)});
    }
    if (lex_.accept_ident("honest")) {
      do {
        Token h = lex_.next();
        if (h.kind != Token::Kind::kVar) lex_.fail_at(h, "expected agent variable");
        auto ht = it->vars().find(h.text);
        if (ht == it->vars().end() || ht->second != VarType::kAgent)
          lex_.fail_at(h, "$" + h.text + " is not an agent variable of " + q.origin_rule);
        q.honest.push_back(h.text);
      } while (lex_.accept_punct(","));
    }
    q.name = lex_.accept_ident("as") ? lex_.expect_identifier() : q.secret_var;
    lex_.expect_punct(";");
    return q;
  }

  UnicityShape unicity() {
    UnicityShape u;
    u.name = lex_.expect_identifier();
    lex_.expect_punct("{");
    Scope scope;
    lex_.expect_ident("first");
    lex_.expect_punct(":");
    u.first = pattern(scope);
    lex_.expect_punct(";");
    lex_.expect_ident("second");
    lex_.expect_punct(":");
    u.second = pattern(scope);
    lex_.expect_punct(";");
    lex_.expect_ident("secret");
    lex_.expect_punct(":");
    Token var = lex_.next();
    if (var.kind != Token::Kind::kVar || scope.count(var.text) == 0)
      lex_.fail_at(var, "expected a variable of the shapes");
    u.secret_var = var.text;
    lex_.expect_punct(";");
    lex_.expect_ident("implies");
    lex_.expect_punct(":");
    if (!lex_.accept_ident("false")) {
      do {
        Token a = lex_.next();
        lex_.expect_punct("=");
        Token b = lex_.next();
        for (const Token* t : {&a, &b}) {
          if (t->kind != Token::Kind::kVar || scope.count(t->text) == 0)
            lex_.fail_at(*t, "expected a variable of the shapes");
        }
        u.equalities.emplace_back(a.text, b.text);
      } while (lex_.accept_punct(","));
    }
    lex_.expect_punct(";");
    lex_.expect_punct("}");
    return u;
  }

  BoundsSpec bounds() {
    BoundsSpec b;
    lex_.expect_punct("{");
    while (!lex_.accept_punct("}")) {
      Token key = lex_.next();
      std::size_t value = lex_.expect_natural();
      lex_.expect_punct(";");
      if (key.text == "max-len") b.max_len = value;
      else if (key.text == "agents") b.agents = value;
      else if (key.text == "nonces") b.nonces = value;
      else if (key.text == "fakes") b.fakes = value;
      else if (key.text == "lists") b.lists = value;
      else if (key.text == "states") b.states = value;
      else lex_.fail_at(key, "unknown bound");
    }
    return b;
  }

  std::vector<Expectation> expectations(const ProtocolFile& f) {
    std::vector<Expectation> out;
    lex_.expect_punct("{");
    while (!lex_.accept_punct("}")) {
      Token kind = lex_.next();
      Token name = lex_.peek();
      Expectation e{Expectation::Kind::kSecrecy, lex_.expect_identifier(), {}};
      Token outcome = lex_.peek();
      e.outcome = lex_.expect_identifier();
      lex_.expect_punct(";");
      std::vector<std::string> allowed;
      bool known = false;
      if (kind.text == "secrecy" || kind.text == "preservation") {
        e.kind = kind.text == "secrecy" ? Expectation::Kind::kSecrecy
                                        : Expectation::Kind::kPreservation;
        known = std::any_of(f.queries.begin(), f.queries.end(),
                            [&](const SecrecyQuery& q) { return q.name == e.name; });
        allowed = kind.text == "secrecy"
                      ? std::vector<std::string>{"holds", "attack", "unknown"}
                      : std::vector<std::string>{"preserved", "violated", "unknown"};
      } else if (kind.text == "unicity") {
        e.kind = Expectation::Kind::kUnicity;
        known = std::any_of(f.unicity.begin(), f.unicity.end(),
                            [&](const UnicityShape& u) { return u.name == e.name; });
        allowed = {"holds", "fails", "unknown"};
      } else {
        lex_.fail_at(kind, "expected secrecy, preservation or unicity");
      }
      if (!known) lex_.fail_at(name, "unknown query " + e.name);
      if (std::find(allowed.begin(), allowed.end(), e.outcome) == allowed.end())
        lex_.fail_at(outcome, "unexpected outcome " + e.outcome);
      out.push_back(std::move(e));
    }
    return out;
  }
};

ProtocolFile Parser::file() {
  ProtocolFile f;
  lex_.expect_ident("protocol");
  std::string name = lex_.expect_identifier();
  lex_.expect_punct(";");
  lex_.expect_ident("agents");
  std::vector<AgentId> agents{parse_agent(lex_)};
  while (lex_.accept_punct(",")) agents.push_back(parse_agent(lex_));
  lex_.expect_punct(";");
  std::set<AgentId> bad;
  if (lex_.accept_ident("bad")) {
    bad.insert(parse_agent(lex_));
    while (lex_.accept_punct(",")) bad.insert(parse_agent(lex_));
    lex_.expect_punct(";");
  }
  while (!lex_.at_end()) {
    if (lex_.accept_ident("rule")) {
      rules_.push_back(rule());
    } else if (lex_.accept_ident("secret")) {
      f.queries.push_back(secret());
    } else if (lex_.accept_ident("unicity")) {
      f.unicity.push_back(unicity());
    } else if (lex_.accept_ident("bounds")) {
      f.bounds = bounds();
    } else if (lex_.accept_ident("expect")) {
      auto more = expectations(f);
      f.expectations.insert(f.expectations.end(), more.begin(), more.end());
    } else {
      lex_.fail("expected rule, secret, unicity, bounds or expect");
    }
  }
  if (rules_.empty()) lex_.fail("a protocol needs at least one rule");
  f.protocol = Protocol(std::move(name), std::move(agents), std::move(bad), std::move(rules_));
  return f;
}

std::string agent_list(const auto& agents) {
  std::string out;
  for (AgentId a : agents) {
    if (!out.empty()) out += ", ";
    out += a.str();
  }
  return out;
}

}  // namespace

ProtocolFile parse_protocol(std::string_view text) { return Parser(text).file(); }

Pattern parse_pattern(std::string_view text) { return Parser(text).standalone_pattern(); }

ProtocolFile load_protocol(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_protocol(buf.str());
}

std::string print_protocol(const ProtocolFile& f) {
  const Protocol& p = f.protocol;
  std::string out = "protocol " + p.name() + ";\n";
  out += "agents " + agent_list(p.agents()) + ";\n";
  if (!p.bad().empty()) out += "bad " + agent_list(p.bad()) + ";\n";
  for (const auto& r : p.rules()) {
    std::set<std::string> declared;
    out += "\nrule " + r.name() + " {\n";
    for (const auto& e : r.pres()) out += "  pre: " + e.str(&declared) + ";\n";
    out += "  post: " + r.post().str(&declared) + ";\n";
    if (!r.wheres().empty()) {
      out += "  where: ";
      for (std::size_t i = 0; i < r.wheres().size(); ++i) {
        if (i != 0) out += ", ";
        out += r.wheres()[i].str(&declared);
      }
      out += ";\n";
    }
    out += "}\n";
  }
  if (!f.queries.empty()) out += "\n";
  for (const auto& q : f.queries) {
    std::set<std::string> declared;
    for (const auto& [v, t] : p.rule(q.origin_rule).vars()) declared.insert(v);
    out += "secret $" + q.secret_var + " of " + q.origin_rule + " guardedby " + q.ks.str(&declared);
    if (!q.honest.empty()) {
      out += " honest";
      for (std::size_t i = 0; i < q.honest.size(); ++i)
        out += (i == 0 ? " $" : ", $") + q.honest[i];
    }
    out += " as " + q.name + ";\n";
  }
  for (const auto& u : f.unicity) {
    std::set<std::string> declared;
    out += "\nunicity " + u.name + " {\n";
    out += "  first: " + u.first.str(&declared) + ";\n";
    out += "  second: " + u.second.str(&declared) + ";\n";
    out += "  secret: $" + u.secret_var + ";\n";
    out += "  implies: ";
    if (u.equalities.empty()) out += "false";
    for (std::size_t i = 0; i < u.equalities.size(); ++i) {
      if (i != 0) out += ", ";
      out += "$" + u.equalities[i].first + " = $" + u.equalities[i].second;
    }
    out += ";\n}\n";
  }
  const BoundsSpec& b = f.bounds;
  if (!b.empty()) {
    out += "\nbounds {";
    auto field = [&out](const char* name, const std::optional<std::size_t>& v) {
      if (v) out += " " + std::string(name) + " " + std::to_string(*v) + ";";
    };
    field("max-len", b.max_len);
    field("agents", b.agents);
    field("nonces", b.nonces);
    field("fakes", b.fakes);
    field("lists", b.lists);
    field("states", b.states);
    out += " }\n";
  }
  if (!f.expectations.empty()) {
    out += "\nexpect {\n";
    for (const auto& e : f.expectations) {
      std::string kind = e.kind == Expectation::Kind::kSecrecy        ? "secrecy"
                         : e.kind == Expectation::Kind::kPreservation ? "preservation"
                                                                      : "unicity";
      out += "  " + kind + " " + e.name + " " + e.outcome + ";\n";
    }
    out += "}\n";
  }
  return out;
}

}  // namespace protosec
