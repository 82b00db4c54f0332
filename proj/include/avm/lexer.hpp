#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "avm/error.hpp"

namespace avm::lex {

enum class Tok {
  ident,
  name_const,
  kw_forall,
  kw_exists,
  kw_in,
  kw_true,
  kw_false,
  lparen,
  rparen,
  dot,
  equals,
  arrow,
  iff,
  wedge,
  vee,
  tilde,
  end,
};

struct Token {
  Tok kind;
  std::string text;
  std::uint64_t number = 0;
  std::size_t pos = 0;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    auto push = [&](Tok k, std::size_t len) {
      out.push_back(Token{k, std::string(s.substr(start, len)), 0, start});
      i = start + len;
    };
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      const std::string_view w = s.substr(i, j - i);
      Tok k = Tok::ident;
      if (w == "forall") k = Tok::kw_forall;
      else if (w == "exists") k = Tok::kw_exists;
      else if (w == "in") k = Tok::kw_in;
      else if (w == "true") k = Tok::kw_true;
      else if (w == "false") k = Tok::kw_false;
      push(k, j - i);
    } else if (c == '#') {
      std::size_t j = i + 1;
      std::uint64_t v = 0;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
        v = v * 10 + static_cast<std::uint64_t>(s[j] - '0');
        if (v > 0xFFFFFFFFULL) throw ParseError("name constant too large", start);
        ++j;
      }
      if (j == i + 1) throw ParseError("expected digits after '#'", start);
      push(Tok::name_const, j - i);
      out.back().number = v;
    } else if (s.substr(i, 3) == "<->") {
      push(Tok::iff, 3);
    } else if (s.substr(i, 2) == "->") {
      push(Tok::arrow, 2);
    } else if (s.substr(i, 2) == "/\\") {
      push(Tok::wedge, 2);
    } else if (s.substr(i, 2) == "\\/") {
      push(Tok::vee, 2);
    } else if (c == '(') {
      push(Tok::lparen, 1);
    } else if (c == ')') {
      push(Tok::rparen, 1);
    } else if (c == '.') {
      push(Tok::dot, 1);
    } else if (c == '=') {
      push(Tok::equals, 1);
    } else if (c == '~') {
      push(Tok::tilde, 1);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }
  out.push_back(Token{Tok::end, "", 0, s.size()});
  return out;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek() const { return toks_[i_]; }
  bool at(Tok k) const { return toks_[i_].kind == k; }
  const Token& next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) throw ParseError(std::string("expected ") + what, peek().pos);
    return next();
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace avm::lex
