#include "protosec/message_io.hpp"

#include <cctype>
#include <limits>

namespace protosec {

SyntaxError::SyntaxError(std::size_t line, std::size_t column, std::string token,
                         const std::string& what)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what +
            (token.empty() ? std::string() : " near '" + token + "'")),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

std::string render_key(KeyId key, KeyStyle style) {
  if (style == KeyStyle::kSymbolic) return describe_key(key);
  return std::to_string(key.value());
}

namespace {

void render_into(const Message& m, KeyStyle style, std::string& out) {
  switch (m.kind()) {
    case Message::Kind::kNumber:
      out += "Number " + std::to_string(m.value());
      return;
    case Message::Kind::kNonce:
      out += "Nonce " + std::to_string(m.value());
      return;
    case Message::Kind::kAgent:
      out += "Agent " + m.agent_id().str();
      return;
    case Message::Kind::kKey:
      out += "Key " + render_key(m.key_id(), style);
      return;
    case Message::Kind::kHash:
      out += "Hash{";
      render_into(m.body(), style, out);
      out += "}";
      return;
    case Message::Kind::kPair: {
      out += "{";
      Message cur = m;
      render_into(cur.first(), style, out);
      cur = cur.second();
      while (cur.is_pair()) {
        out += ", ";
        render_into(cur.first(), style, out);
        cur = cur.second();
      }
      out += ", ";
      render_into(cur, style, out);
      out += "}";
      return;
    }
    case Message::Kind::kCrypt:
      out += "Crypt(" + render_key(m.key_id(), style) + "){";
      render_into(m.body(), style, out);
      out += "}";
      return;
  }
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '\'';
}

}  // namespace

std::string render(const Message& m, KeyStyle style) {
  std::string out;
  render_into(m, style, out);
  return out;
}

Lexer::Lexer(std::string_view text) {
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      tok.kind = Token::Kind::kNumber;
      tok.text = std::string(text.substr(start, j - start));
      advance(j - i);
    } else if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      tok.kind = Token::Kind::kIdent;
      tok.text = std::string(text.substr(start, j - start));
      advance(j - i);
    } else if (c == '$') {
      std::size_t j = i + 1;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      if (j == i + 1) throw SyntaxError(line, col, "$", "expected variable name after '$'");
      tok.kind = Token::Kind::kVar;
      tok.text = std::string(text.substr(i + 1, j - i - 1));
      advance(j - i);
    } else if (c == '!' && i + 1 < text.size() && text[i + 1] == '=') {
      tok.kind = Token::Kind::kPunct;
      tok.text = "!=";
      advance(2);
    } else if (std::string_view("{}(),:;=+").find(c) != std::string_view::npos) {
      tok.kind = Token::Kind::kPunct;
      tok.text = std::string(1, c);
      advance(1);
    } else {
      throw SyntaxError(line, col, std::string(1, c), "unexpected character");
    }
    tokens_.push_back(std::move(tok));
  }
  Token end;
  end.kind = Token::Kind::kEnd;
  end.line = line;
  end.column = col;
  tokens_.push_back(end);
}

const Token& Lexer::peek(std::size_t ahead) const {
  std::size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
  return tokens_[idx];
}

Token Lexer::next() {
  Token t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool Lexer::accept_punct(std::string_view p) {
  if (peek().kind == Token::Kind::kPunct && peek().text == p) {
    next();
    return true;
  }
  return false;
}

bool Lexer::accept_ident(std::string_view word) {
  if (peek().kind == Token::Kind::kIdent && peek().text == word) {
    next();
    return true;
  }
  return false;
}

void Lexer::expect_punct(std::string_view p) {
  if (!accept_punct(p)) fail("expected '" + std::string(p) + "'");
}

void Lexer::expect_ident(std::string_view word) {
  if (!accept_ident(word)) fail("expected '" + std::string(word) + "'");
}

std::string Lexer::expect_identifier() {
  if (peek().kind != Token::Kind::kIdent) fail("expected identifier");
  return next().text;
}

uint64_t Lexer::expect_natural() {
  if (peek().kind != Token::Kind::kNumber) fail("expected natural number");
  const Token tok = next();
  try {
    return std::stoull(tok.text);
  } catch (const std::exception&) {
    fail_at(tok, "number out of range");
  }
}

void Lexer::fail(const std::string& what) const { fail_at(peek(), what); }

void Lexer::fail_at(const Token& tok, const std::string& what) const {
  throw SyntaxError(tok.line, tok.column, tok.kind == Token::Kind::kEnd ? "<end>" : tok.text,
                    what);
}

AgentId parse_agent(Lexer& lex) {
  if (lex.accept_ident("Server")) return AgentId::server();
  if (lex.accept_ident("Spy")) return AgentId::spy();
  if (lex.accept_ident("Friend")) return AgentId::friend_(lex.expect_natural());
  lex.fail("expected agent (Server, Friend <n> or Spy)");
}

KeyId parse_key(Lexer& lex) {
  if (lex.peek().kind == Token::Kind::kNumber) return KeyId(lex.expect_natural());
  auto agent_arg = [&lex]() {
    bool paren = lex.accept_punct("(");
    AgentId a = parse_agent(lex);
    if (paren) lex.expect_punct(")");
    return a;
  };
  if (lex.accept_ident("pubK")) return pub_key(agent_arg());
  if (lex.accept_ident("priK")) return pri_key(agent_arg());
  if (lex.accept_ident("shrK")) return shr_key(agent_arg());
  if (lex.accept_ident("sessionK")) {
    bool paren = lex.accept_punct("(");
    uint64_t i = lex.expect_natural();
    if (paren) lex.expect_punct(")");
    return session_key(i);
  }
  lex.fail("expected key");
}

namespace {

// `{X}` or `{X, Y, ...}`. Hash and Crypt bodies may leave out the inner braces
// of a tuple: Crypt(k){X, Y} reads as Crypt(k){{X, Y}}.
Message parse_braced(Lexer& lex) {
  lex.expect_punct("{");
  std::vector<Message> items{parse_message(lex)};
  while (lex.accept_punct(",")) items.push_back(parse_message(lex));
  lex.expect_punct("}");
  return items.size() == 1 ? items.front() : Message::tuple(items);
}

}  // namespace

Message parse_message(Lexer& lex) {
  if (lex.accept_ident("Number")) return Message::number(lex.expect_natural());
  if (lex.accept_ident("Nonce")) return Message::nonce(lex.expect_natural());
  if (lex.accept_ident("Agent")) return Message::agent(parse_agent(lex));
  if (lex.accept_ident("Key")) return Message::key(parse_key(lex));
  if (lex.accept_ident("Hash")) return Message::hash(parse_braced(lex));
  if (lex.accept_ident("Crypt")) {
    lex.expect_punct("(");
    KeyId k = parse_key(lex);
    lex.expect_punct(")");
    return Message::crypt(k, parse_braced(lex));
  }
  if (lex.peek().kind == Token::Kind::kPunct && lex.peek().text == "{") {
    Message m = parse_braced(lex);
    if (!m.is_pair()) lex.fail("a pair needs at least two components");
    return m;
  }
  lex.fail("expected message");
}

Message parse_message(std::string_view text) {
  Lexer lex(text);
  Message m = parse_message(lex);
  if (!lex.at_end()) lex.fail("trailing input after message");
  return m;
}

MessageSet parse_message_set(std::string_view text) {
  Lexer lex(text);
  MessageSet out;
  lex.expect_punct("{");
  if (!lex.accept_punct("}")) {
    out.insert(parse_message(lex));
    while (lex.accept_punct(",")) out.insert(parse_message(lex));
    lex.expect_punct("}");
  }
  if (!lex.at_end()) lex.fail("trailing input after message set");
  return out;
}

}  // namespace protosec
