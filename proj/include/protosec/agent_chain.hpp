#ifndef PROTOSEC_AGENT_CHAIN_HPP_
#define PROTOSEC_AGENT_CHAIN_HPP_

// Mobile-agent offer chains (protocols P1 and P2).
//
//   sign B X          = {Agent B, X, Crypt(priK B){Hash X}}
//   chain P1 B ofr A L C = sign B {Crypt(pubK A){Nonce ofr}, Hash{head L, Agent C}}
//   chain P2 B ofr A L C = {Crypt(pubK A){sign B (Nonce ofr)}, Hash{head L, Agent C}}
//   anchor A n B      = chain A n A (cons nil nil) B
//
// Offer lists are newest first: position 0 holds the latest offer and the
// last position holds the anchor.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protosec/message.hpp"
#include "protosec/msg_list.hpp"
#include "protosec/pattern.hpp"
#include "protosec/protocol.hpp"

namespace protosec {

enum class ChainVariant { kP1, kP2 };

std::string_view variant_name(ChainVariant v);
/// "p1" or "p2" (case-insensitive); throws Error otherwise.
ChainVariant parse_variant(std::string_view text);

class OwnerKeyRequired : public Error {
 public:
  OwnerKeyRequired() : Error("P2 chains can only be read with the owner's private key") {}
};

class NotAChain : public Error {
 public:
  explicit NotAChain(const Message& m) : Error("not a chain message: " + m.str()) {}
};

Message sign(AgentId b, const Message& x);
/// m has the shape of sign B X with a matching signature.
bool verify_signature(const Message& m);
/// The signer B and body X of a well-formed signature.
std::optional<std::pair<AgentId, Message>> signature_parts(const Message& m);

Message chain(ChainVariant v, AgentId b, uint64_t ofr, AgentId a, const Message& l, AgentId c);
Message anchor(ChainVariant v, AgentId a, uint64_t n, AgentId b);

Message reqm(ChainVariant v, AgentId a, uint64_t r, uint64_t n, const Message& itinerary, AgentId b);
Message prom(ChainVariant v, AgentId b, uint64_t ofr, AgentId a, uint64_t r,
             const Message& itinerary, const Message& l, const Message& j, AgentId c);

/// The same constructions over patterns, used by rule definitions.
Pattern sign_pattern(const AgentTerm& b, const Pattern& x);
Pattern chain_pattern(ChainVariant v, const AgentTerm& b, const Pattern& ofr, const AgentTerm& a,
                      const Pattern& l, const AgentTerm& c);
Pattern anchor_pattern(ChainVariant v, const AgentTerm& a, const Pattern& n, const AgentTerm& b);

/// Fields of a chain message as they can be read from its structure.
struct ChainFields {
  AgentId signer;
  uint64_t ofr;
  AgentId owner;
  Message previous;
  AgentId next;
};

/// Throws NotAChain. Reading P2 fields needs the owner's key.
ChainFields chain_fields(const Message& m, ChainVariant v, bool owner_key_access);
/// The signer of a chain message.
AgentId shop(const Message& m, ChainVariant v, bool owner_key_access);
/// The next shop committed to in the hash of a chain message.
AgentId next_shop(const Message& m, ChainVariant v);

struct ValidityReport {
  bool valid = false;
  /// List position (0 = newest) at which the derivation fails.
  std::optional<std::size_t> failing_position;
  std::string reason;
};

/// Decides membership of l in valid A n B by descent from the anchor.
/// Throws OwnerKeyRequired for P2 without owner key access and MalformedList
/// when l is not a list.
ValidityReport check_valid(const Message& l, AgentId a, uint64_t n, AgentId b, ChainVariant v,
                           bool owner_key_access);
bool valid_member(const Message& l, AgentId a, uint64_t n, AgentId b, ChainVariant v,
                  bool owner_key_access);

/// Agents readable in m by someone without priK(owner): parts of m not
/// entering Hash bodies or encryptions under pubK(owner).
std::set<AgentId> visible_agents(const Message& m, AgentId owner);

/// Candidates for replacing or inserting offers into l: the elements of l,
/// chains signed by the spy over every suffix of l, and chain terms over a
/// small pool of agents and nonces.
std::vector<Message> mutation_universe(const Message& l, ChainVariant v, AgentId owner,
                                       const std::vector<AgentId>& agents,
                                       const std::vector<uint64_t>& offers);

/// Every valid list of length at most max_len for owner a, session n and
/// first shop b, with next shops drawn from agents and offers from offers.
std::vector<Message> valid_chains(ChainVariant v, AgentId a, uint64_t n, AgentId b,
                                  const std::vector<AgentId>& agents,
                                  const std::vector<uint64_t>& offers, std::size_t max_len);

/// The Req and Prop rules for the given variant.
Protocol p_protocol(ChainVariant v, std::vector<AgentId> agents, std::set<AgentId> bad = {});

/// "<position> <shop> <offer>" lines followed by the verdict.
std::string dump_chain(const Message& l, AgentId a, uint64_t n, AgentId b, ChainVariant v,
                       bool owner_key_access);

}  // namespace protosec

#endif  // PROTOSEC_AGENT_CHAIN_HPP_
