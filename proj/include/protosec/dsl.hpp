#ifndef PROTOSEC_DSL_HPP_
#define PROTOSEC_DSL_HPP_

// Protocol description files.
//
//   protocol NSL;
//   agents Friend 1, Friend 2, Spy;
//   bad Friend 3;
//   rule NS1 {
//     post: Says $A $B Crypt(pubK($B)){Nonce $NA, Agent $A};
//   }
//   rule NS2 {
//     pre: Says $A' $B Crypt(pubK($B)){Nonce $NA, Agent $A};
//     post: Says $B $A Crypt(pubK($A)){Nonce $NA, Nonce $NB, Agent $B};
//     where: $A != $B;
//   }
//   secret $NA of NS1 guardedby {priK($A), priK($B)} honest $A, $B;
//   unicity U1 {
//     first: Crypt(pubK($B)){Nonce $NA, Agent $A};
//     second: Crypt(pubK($B2)){Nonce $NA, Agent $A2};
//     secret: $NA;
//     implies: $A = $A2, $B = $B2;
//   }
//   bounds { max-len 7; agents 3; nonces 2; fakes 1; }
//   expect { secrecy NA holds; preservation NA preserved; unicity U1 holds; }
//
// Variables are typed by position (Agent, Nonce, Key, Number, key
// arguments); a bare variable is a msg unless annotated `$I:agents`. Any
// occurrence may carry an annotation, which must agree with the position.
//
// Builtins inside patterns: nil, cons(X, L), head(L), app(L1, L2), del(X, L),
// sign(Agent B, X), chain1/chain2(Agent B, Nonce ofr, Agent A, L, Agent C),
// anchor1/anchor2(Agent A, Nonce n, Agent B). Only head, app and del remain
// as functions; the others expand to plain patterns.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protosec/message_io.hpp"
#include "protosec/preservation.hpp"
#include "protosec/protocol.hpp"

namespace protosec {

class TypeError : public Error {
 public:
  TypeError(const std::string& variable, VarType expected, VarType found, std::size_t line,
            std::size_t column);
  const std::string& variable() const { return variable_; }
  VarType expected() const { return expected_; }
  VarType found() const { return found_; }

 private:
  std::string variable_;
  VarType expected_;
  VarType found_;
};

struct BoundsSpec {
  std::optional<std::size_t> max_len;
  std::optional<std::size_t> agents;
  std::optional<std::size_t> nonces;
  std::optional<std::size_t> fakes;
  std::optional<std::size_t> lists;
  std::optional<std::size_t> states;

  bool empty() const { return !max_len && !agents && !nonces && !fakes && !lists && !states; }
  friend bool operator==(const BoundsSpec&, const BoundsSpec&) = default;
};

struct Expectation {
  enum class Kind { kSecrecy, kPreservation, kUnicity };
  Kind kind;
  std::string name;
  /// holds | attack | unknown, preserved | violated | unknown, holds | fails
  std::string outcome;
  friend bool operator==(const Expectation&, const Expectation&) = default;
};

struct ProtocolFile {
  Protocol protocol;
  std::vector<SecrecyQuery> queries;
  std::vector<UnicityShape> unicity;
  BoundsSpec bounds;
  std::vector<Expectation> expectations;

  /// Throws Error for an unknown name.
  const SecrecyQuery& query(const std::string& name) const;
  const UnicityShape& shape(const std::string& name) const;

  /// Defaults: max-len 4, every declared agent, 1 nonce per role, 1 fake.
  ExplorationBounds exploration_bounds() const;

  friend bool operator==(const ProtocolFile&, const ProtocolFile&) = default;
};

/// Throws SyntaxError, TypeError or DuplicateRuleName.
ProtocolFile parse_protocol(std::string_view text);
ProtocolFile load_protocol(const std::string& path);
std::string print_protocol(const ProtocolFile& f);

/// Parses a single pattern with a fresh variable scope.
Pattern parse_pattern(std::string_view text);

}  // namespace protosec

#endif  // PROTOSEC_DSL_HPP_
