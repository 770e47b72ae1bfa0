#ifndef PROTOSEC_MESSAGE_IO_HPP_
#define PROTOSEC_MESSAGE_IO_HPP_

// Canonical textual rendering of messages:
//
//   Number n | Nonce n | Agent Server | Agent Friend k | Agent Spy | Key k
//   Hash{X} | {X, Y} | Crypt(k){X}
//
// Pairs nest to the right, so {X, {Y, Z}} is printed as {X, Y, Z}. The parser
// additionally accepts symbolic key expressions pubK(A), priK(A), shrK(A) and
// sessionK(i) wherever a key number is expected, and reads Hash{X, Y} and
// Crypt(k){X, Y} as Hash{{X, Y}} and Crypt(k){{X, Y}}.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "protosec/message.hpp"

namespace protosec {

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, std::string token, const std::string& what);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string token_;
};

enum class KeyStyle { kCanonical, kSymbolic };

std::string render(const Message& m, KeyStyle style = KeyStyle::kCanonical);
std::string render_key(KeyId key, KeyStyle style = KeyStyle::kCanonical);

/// Parses one message; the whole input must be consumed.
Message parse_message(std::string_view text);
MessageSet parse_message_set(std::string_view text);

struct Token {
  enum class Kind { kIdent, kNumber, kVar, kPunct, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Tokenizer shared by the message and protocol parsers. `#` starts a comment
/// that runs to the end of the line.
class Lexer {
 public:
  explicit Lexer(std::string_view text);

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at_end() const { return peek().kind == Token::Kind::kEnd; }

  bool accept_punct(std::string_view p);
  bool accept_ident(std::string_view word);
  void expect_punct(std::string_view p);
  void expect_ident(std::string_view word);
  std::string expect_identifier();
  uint64_t expect_natural();

  [[noreturn]] void fail(const std::string& what) const;
  [[noreturn]] void fail_at(const Token& tok, const std::string& what) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

/// Grammar pieces reused by the protocol parser.
AgentId parse_agent(Lexer& lex);
KeyId parse_key(Lexer& lex);
Message parse_message(Lexer& lex);

}  // namespace protosec

#endif  // PROTOSEC_MESSAGE_IO_HPP_
