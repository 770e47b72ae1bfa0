#include "protosec/agent_chain.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace protosec {

std::string_view variant_name(ChainVariant v) { return v == ChainVariant::kP1 ? "p1" : "p2"; }

ChainVariant parse_variant(std::string_view text) {
  std::string lower;
  for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "p1") return ChainVariant::kP1;
  if (lower == "p2") return ChainVariant::kP2;
  throw Error("unknown protocol variant '" + std::string(text) + "' (expected p1 or p2)");
}

Message sign(AgentId b, const Message& x) {
  return Message::tuple({Message::agent(b), x, Message::crypt(pri_key(b), Message::hash(x))});
}

std::optional<std::pair<AgentId, Message>> signature_parts(const Message& m) {
  if (!m.is_pair() || m.first().kind() != Message::Kind::kAgent || !m.second().is_pair())
    return std::nullopt;
  return std::make_pair(m.first().agent_id(), m.second().first());
}

bool verify_signature(const Message& m) {
  auto parts = signature_parts(m);
  return parts && m == sign(parts->first, parts->second);
}

Message chain(ChainVariant v, AgentId b, uint64_t ofr, AgentId a, const Message& l, AgentId c) {
  Message link = Message::hash(Message::pair(msglist::head(l), Message::agent(c)));
  Message offer = Message::nonce(ofr);
  if (v == ChainVariant::kP1) return sign(b, Message::pair(Message::crypt(pub_key(a), offer), link));
  return Message::pair(Message::crypt(pub_key(a), sign(b, offer)), link);
}

Message anchor(ChainVariant v, AgentId a, uint64_t n, AgentId b) {
  return chain(v, a, n, a, msglist::cons(msglist::nil(), msglist::nil()), b);
}

Message reqm(ChainVariant v, AgentId a, uint64_t r, uint64_t n, const Message& itinerary, AgentId b) {
  Message agents = msglist::cons(Message::agent(a), msglist::cons(Message::agent(b), itinerary));
  Message offers = msglist::cons(anchor(v, a, n, b), msglist::nil());
  return Message::tuple({Message::agent(a), Message::number(r), agents, offers});
}

Message prom(ChainVariant v, AgentId b, uint64_t ofr, AgentId a, uint64_t r,
             const Message& itinerary, const Message& l, const Message& j, AgentId c) {
  Message next = msglist::app(j, msglist::del(Message::agent(b), itinerary));
  Message offers = msglist::cons(chain(v, b, ofr, a, l, c), l);
  return Message::tuple({Message::agent(a), Message::number(r), next, offers});
}

Pattern sign_pattern(const AgentTerm& b, const Pattern& x) {
  KeyTerm k = KeyTerm::derived(KeyTerm::Kind::kPri, b);
  return Pattern::tuple({Pattern::agent(b), x, Pattern::crypt(k, Pattern::hash(x))});
}

namespace {

Pattern head_pattern(const Pattern& l) {
  if (l.kind() == Pattern::Kind::kPair) return l.first();
  if (auto m = l.as_message()) return Pattern::ground(msglist::head(*m));
  return Pattern::func("head", {l});
}

}  // namespace

Pattern chain_pattern(ChainVariant v, const AgentTerm& b, const Pattern& ofr, const AgentTerm& a,
                      const Pattern& l, const AgentTerm& c) {
  Pattern link = Pattern::hash(Pattern::pair(head_pattern(l), Pattern::agent(c)));
  KeyTerm owner = KeyTerm::derived(KeyTerm::Kind::kPub, a);
  if (v == ChainVariant::kP1) return sign_pattern(b, Pattern::pair(Pattern::crypt(owner, ofr), link));
  return Pattern::pair(Pattern::crypt(owner, sign_pattern(b, ofr)), link);
}

Pattern anchor_pattern(ChainVariant v, const AgentTerm& a, const Pattern& n, const AgentTerm& b) {
  Pattern nil = Pattern::ground(msglist::nil());
  return chain_pattern(v, a, n, a, Pattern::pair(nil, nil), b);
}

namespace {

bool is_agent(const Message& m) { return m.kind() == Message::Kind::kAgent; }

// Hash{prev, Agent C}
std::optional<std::pair<Message, AgentId>> link_fields(const Message& h) {
  if (h.kind() != Message::Kind::kHash || !h.body().is_pair() || !is_agent(h.body().second()))
    return std::nullopt;
  return std::make_pair(h.body().first(), h.body().second().agent_id());
}

// Crypt(pubK A){X}
std::optional<AgentId> owner_of(const Message& c) {
  if (!c.is_crypt() || key_kind(c.key_id()) != KeyKind::kPublic) return std::nullopt;
  return key_owner(c.key_id());
}

}  // namespace

ChainFields chain_fields(const Message& m, ChainVariant v, bool owner_key_access) {
  if (v == ChainVariant::kP1) {
    auto sig = signature_parts(m);
    if (!sig || !sig->second.is_pair()) throw NotAChain(m);
    const Message& enc = sig->second.first();
    auto owner = owner_of(enc);
    auto link = link_fields(sig->second.second());
    if (!owner || !link || enc.body().kind() != Message::Kind::kNonce) throw NotAChain(m);
    return ChainFields{sig->first, enc.body().value(), *owner, link->first, link->second};
  }
  if (!m.is_pair()) throw NotAChain(m);
  auto owner = owner_of(m.first());
  auto link = link_fields(m.second());
  if (!owner || !link) throw NotAChain(m);
  if (!owner_key_access) throw OwnerKeyRequired();
  auto sig = signature_parts(m.first().body());
  if (!sig || sig->second.kind() != Message::Kind::kNonce) throw NotAChain(m);
  return ChainFields{sig->first, sig->second.value(), *owner, link->first, link->second};
}

AgentId shop(const Message& m, ChainVariant v, bool owner_key_access) {
  return chain_fields(m, v, owner_key_access).signer;
}

AgentId next_shop(const Message& m, ChainVariant v) {
  std::optional<std::pair<Message, AgentId>> link;
  if (v == ChainVariant::kP1) {
    auto sig = signature_parts(m);
    if (sig && sig->second.is_pair()) link = link_fields(sig->second.second());
  } else if (m.is_pair()) {
    link = link_fields(m.second());
  }
  if (!link) throw NotAChain(m);
  return link->second;
}

ValidityReport check_valid(const Message& l, AgentId a, uint64_t n, AgentId b, ChainVariant v,
                           bool owner_key_access) {
  if (v == ChainVariant::kP2 && !owner_key_access) throw OwnerKeyRequired();
  std::vector<Message> items = msglist::to_vector(l);
  ValidityReport report;
  if (items.empty()) {
    report.failing_position = 0;
    report.reason = "empty offer list";
    return report;
  }
  std::size_t last = items.size() - 1;
  if (items[last] != anchor(v, a, n, b)) {
    report.failing_position = last;
    report.reason = "last element is not the anchor";
    return report;
  }
  for (std::size_t k = last; k-- > 0;) {
    std::vector<Message> rest(items.begin() + static_cast<std::ptrdiff_t>(k) + 1, items.end());
    Message tail = msglist::from_vector(rest);
    try {
      ChainFields f = chain_fields(items[k], v, true);
      Message expected = chain(v, next_shop(items[k + 1], v), f.ofr, a, tail, f.next);
      if (items[k] == expected) continue;
      report.reason = "offer does not extend the chain below it";
    } catch (const NotAChain&) {
      report.reason = "not a chain message";
    }
    report.failing_position = k;
    return report;
  }
  report.valid = true;
  return report;
}

bool valid_member(const Message& l, AgentId a, uint64_t n, AgentId b, ChainVariant v,
                  bool owner_key_access) {
  return check_valid(l, a, n, b, v, owner_key_access).valid;
}

namespace {

void visible_into(const Message& m, AgentId owner, std::set<AgentId>& out) {
  switch (m.kind()) {
    case Message::Kind::kAgent:
      out.insert(m.agent_id());
      break;
    case Message::Kind::kPair:
      visible_into(m.first(), owner, out);
      visible_into(m.second(), owner, out);
      break;
    case Message::Kind::kCrypt:
      if (m.key_id() != pub_key(owner)) visible_into(m.body(), owner, out);
      break;
    default:
      break;
  }
}

}  // namespace

std::set<AgentId> visible_agents(const Message& m, AgentId owner) {
  std::set<AgentId> out;
  visible_into(m, owner, out);
  return out;
}

std::vector<Message> mutation_universe(const Message& l, ChainVariant v, AgentId owner,
                                       const std::vector<AgentId>& agents,
                                       const std::vector<uint64_t>& offers) {
  std::vector<Message> items = msglist::to_vector(l);
  std::vector<Message> suffixes;
  for (std::size_t i = 0; i < items.size(); ++i)
    suffixes.push_back(
        msglist::from_vector(std::vector<Message>(items.begin() + static_cast<std::ptrdiff_t>(i), items.end())));
  suffixes.push_back(msglist::cons(msglist::nil(), msglist::nil()));

  std::set<Message> out(items.begin(), items.end());
  std::vector<uint64_t> spy_offers = offers;
  spy_offers.push_back(offers.empty() ? 1 : offers.back() + 1);
  for (const auto& t : suffixes)
    for (uint64_t ofr : spy_offers)
      for (AgentId c : agents) out.insert(chain(v, AgentId::spy(), ofr, owner, t, c));
  std::vector<AgentId> owners{owner, AgentId::spy()};
  for (AgentId signer : agents)
    for (AgentId a : owners)
      for (const auto& t : suffixes)
        for (AgentId c : agents)
          if (!offers.empty()) out.insert(chain(v, signer, offers.front(), a, t, c));
  for (uint64_t ofr : offers) out.insert(Message::nonce(ofr));
  out.insert(msglist::nil());
  return {out.begin(), out.end()};
}

std::vector<Message> valid_chains(ChainVariant v, AgentId a, uint64_t n, AgentId b,
                                  const std::vector<AgentId>& agents,
                                  const std::vector<uint64_t>& offers, std::size_t max_len) {
  std::vector<Message> out;
  if (max_len == 0) return out;
  std::vector<Message> level{msglist::cons(anchor(v, a, n, b), msglist::nil())};
  for (std::size_t len = 1; len <= max_len && !level.empty(); ++len) {
    out.insert(out.end(), level.begin(), level.end());
    if (len == max_len) break;
    std::vector<Message> next;
    for (const auto& l : level) {
      AgentId signer = next_shop(msglist::head(l), v);
      for (uint64_t ofr : offers)
        for (AgentId c : agents) next.push_back(msglist::cons(chain(v, signer, ofr, a, l, c), l));
    }
    level = std::move(next);
  }
  return out;
}

Protocol p_protocol(ChainVariant v, std::vector<AgentId> agents, std::set<AgentId> bad) {
  auto agent = [](const char* name) { return AgentTerm{std::string(name)}; };
  auto nat = [](const char* name) { return NatTerm{std::string(name)}; };
  AgentTerm a = agent("A");
  AgentTerm b = agent("B");
  AgentTerm c = agent("C");
  Pattern itinerary = Pattern::var("I", VarType::kAgentList);
  Pattern nil = Pattern::ground(msglist::nil());

  Pattern req_body = Pattern::tuple(
      {Pattern::agent(a), Pattern::number(nat("r")),
       Pattern::pair(Pattern::agent(a), Pattern::pair(Pattern::agent(b), itinerary)),
       Pattern::pair(anchor_pattern(v, a, Pattern::nonce(nat("n")), b), nil)});
  Rule req("Req", {}, EventPattern{a, b, req_body});

  Pattern offers = Pattern::var("L", VarType::kMsg);
  Pattern next = Pattern::func(
      "app", {Pattern::var("J", VarType::kAgentList), Pattern::func("del", {Pattern::agent(b), itinerary})});
  Pattern state = Pattern::tuple({Pattern::agent(a), Pattern::number(nat("r")), itinerary, offers});
  Pattern prop_body = Pattern::tuple(
      {Pattern::agent(a), Pattern::number(nat("r")), next,
       Pattern::pair(chain_pattern(v, b, Pattern::nonce(nat("ofr")), a, offers, c), offers)});
  Rule prop("Prop", {EventPattern{agent("A'"), b, state}}, EventPattern{b, c, prop_body},
            {Condition::is_in(Pattern::agent(c), next)});

  std::string name = v == ChainVariant::kP1 ? "P1" : "P2";
  return Protocol(name, std::move(agents), std::move(bad), {std::move(req), std::move(prop)});
}

std::string dump_chain(const Message& l, AgentId a, uint64_t n, AgentId b, ChainVariant v,
                       bool owner_key_access) {
  std::vector<Message> items = msglist::to_vector(l);
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string who = "<malformed>";
    try {
      who = shop(items[i], v, owner_key_access).str();
    } catch (const OwnerKeyRequired&) {
      who = "<hidden>";
    } catch (const NotAChain&) {
    }
    out += std::to_string(i) + " " + who + " " + items[i].str() + "\n";
  }
  if (v == ChainVariant::kP2 && !owner_key_access) return out + "verdict: owner key required\n";
  ValidityReport r = check_valid(l, a, n, b, v, owner_key_access);
  if (r.valid) return out + "verdict: valid\n";
  return out + "verdict: invalid at position " + std::to_string(*r.failing_position) + " (" +
         r.reason + ")\n";
}

}  // namespace protosec
