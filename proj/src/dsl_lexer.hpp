#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sceneforge::dsl::detail {

enum class Tok {
  kIdent,
  kNumber,
  kLParen,
  kRParen,
  kLBracket,
  kRBracket,
  kLBrace,
  kRBrace,
  kComma,
  kAssign,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kDotDot,
  kNewline,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

/// Newlines inside parentheses or square brackets are dropped so long
/// argument lists may wrap. Comments run from `#` to end of line.
std::vector<Token> lex(std::string_view source);

}  // namespace sceneforge::dsl::detail
