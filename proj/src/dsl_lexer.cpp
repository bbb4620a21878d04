#include "dsl_lexer.hpp"

#include <cctype>
#include <charconv>

#include "sceneforge/error.hpp"

namespace sceneforge::dsl::detail {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  int depth = 0;
  std::size_t i = 0;

  const auto push = [&](Tok kind, std::string text, int c) {
    out.push_back(Token{kind, std::move(text), 0.0, line, c});
  };

  while (i < src.size()) {
    const char c = src[i];
    const int start_col = col;
    if (c == '\n') {
      if (depth == 0) push(Tok::kNewline, "\n", start_col);
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      push(Tok::kIdent, std::string(src.substr(i, j - i)), start_col);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (is_digit(c)) {
      std::size_t j = i;
      while (j < src.size() && is_digit(src[j])) ++j;
      // A '.' starts a fraction unless it is the first half of a range "..".
      if (j < src.size() && src[j] == '.' && !(j + 1 < src.size() && src[j + 1] == '.')) {
        ++j;
        while (j < src.size() && is_digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && is_digit(src[k])) {
          while (k < src.size() && is_digit(src[k])) ++k;
          j = k;
        }
      }
      const std::string_view text = src.substr(i, j - i);
      double value = 0.0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw SyntaxError("malformed number '" + std::string(text) + "'", line, start_col);
      }
      Token tok{Tok::kNumber, std::string(text), value, line, start_col};
      out.push_back(std::move(tok));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '(': kind = Tok::kLParen; ++depth; break;
      case ')': kind = Tok::kRParen; depth = depth > 0 ? depth - 1 : 0; break;
      case '[': kind = Tok::kLBracket; ++depth; break;
      case ']': kind = Tok::kRBracket; depth = depth > 0 ? depth - 1 : 0; break;
      case '{': kind = Tok::kLBrace; break;
      case '}': kind = Tok::kRBrace; break;
      case ',': kind = Tok::kComma; break;
      case '=': kind = Tok::kAssign; break;
      case '+': kind = Tok::kPlus; break;
      case '-': kind = Tok::kMinus; break;
      case '*': kind = Tok::kStar; break;
      case '/': kind = Tok::kSlash; break;
      case '.':
        if (i + 1 < src.size() && src[i + 1] == '.') {
          kind = Tok::kDotDot;
          len = 2;
          break;
        }
        [[fallthrough]];
      default: {
        std::string shown;
        if (std::isprint(static_cast<unsigned char>(c))) {
          shown = std::string("'") + c + "'";
        } else {
          static const char* hex = "0123456789abcdef";
          const auto u = static_cast<unsigned char>(c);
          shown = std::string("byte 0x") + hex[u >> 4] + hex[u & 15];
        }
        throw SyntaxError("unexpected character " + shown, line, start_col);
      }
    }
    push(kind, std::string(src.substr(i, len)), start_col);
    i += len;
    col += static_cast<int>(len);
  }
  push(Tok::kNewline, "\n", col);
  push(Tok::kEnd, "", col);
  return out;
}

}  // namespace sceneforge::dsl::detail
