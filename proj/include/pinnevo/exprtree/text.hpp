#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pinnevo/exprtree/tree.hpp"

namespace pinnevo::exprtree {

/// Syntax error with the 1-based column (in code points) of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(int column, const std::string& what)
      : std::runtime_error("column " + std::to_string(column) + ": " + what), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

namespace detail {

inline constexpr std::string_view kGreek[] = {"\xCE\xB1", "\xCE\xB2", "\xCE\xB3"};  // α β γ
inline constexpr std::string_view kAscii[] = {"a", "b", "c"};

inline std::string param_name(int idx, bool ascii) {
  if (idx < 3) return std::string(ascii ? kAscii[idx] : kGreek[idx]);
  return (ascii ? "p" : "\xCE\xB8") + std::to_string(idx);
}

class Printer {
 public:
  Printer(const ActivationTree& t, bool ascii) : t_(t), ascii_(ascii) {}

  std::string node(int i, bool arg_ctx) const {
    const Node& n = t_.nodes()[i];
    std::string core = core_of(i, arg_ctx);
    if (n.out_param < 0) return core;
    const bool infix = n.kind == NodeKind::binary && is_infix(n.binary());
    return param_name(n.out_param, ascii_) + "*" + (infix ? "(" + core + ")" : core);
  }

 private:
  std::string leaf(const Node& n) const {
    return n.leaf_param >= 0 ? param_name(n.leaf_param, ascii_) + "*x" : "x";
  }

  std::string arg(const Node& n) const { return n.has_leaf() ? leaf(n) : node(n.child[0], true); }

  std::string operand(int i) const {
    const Node& n = t_.nodes()[i];
    std::string s = node(i, false);
    if (n.kind == NodeKind::binary && is_infix(n.binary())) return "(" + s + ")";
    return s;
  }

  std::string core_of(int i, bool arg_ctx) const {
    const Node& n = t_.nodes()[i];
    if (n.kind == NodeKind::binary) {
      if (!is_infix(n.binary()))
        return std::string(name(n.binary())) + "(" + node(n.child[0], false) + "," +
               node(n.child[1], false) + ")";
      return operand(n.child[0]) + std::string(name(n.binary())) + operand(n.child[1]);
    }
    const bool bare_leaf = n.has_leaf() && n.leaf_param < 0;
    if (n.unary() == UnaryOp::identity && bare_leaf && !arg_ctx) return "x";
    if (n.unary() == UnaryOp::negate && bare_leaf) return "-x";
    return std::string(name(n.unary())) + "(" + arg(n) + ")";
  }

  const ActivationTree& t_;
  bool ascii_;
};

enum class Tok { ident, param, lparen, rparen, comma, plus, minus, star, slash, end };

struct Token {
  Tok kind;
  std::string text;
  int column;
};

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  int col = 1;
  std::size_t i = 0;
  auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || c == '_'; };
  auto is_alnum = [&](char c) { return is_alpha(c) || (c >= '0' && c <= '9'); };
  while (i < s.size()) {
    const char c = s[i];
    const int start = col;
    if (c == ' ' || c == '\t') {
      ++i, ++col;
      continue;
    }
    if (s.substr(i, 2) == "\xC2\xB7") {  // middle dot
      out.push_back({Tok::star, "*", start});
      i += 2, ++col;
      continue;
    }
    bool greek = false;
    for (int g = 0; g < 3; ++g) {
      if (s.substr(i, 2) == kGreek[g]) {
        out.push_back({Tok::param, std::string(kGreek[g]), start});
        i += 2, ++col;
        greek = true;
        break;
      }
    }
    if (greek) continue;
    if (is_alpha(c)) {
      std::size_t j = i;
      while (j < s.size() && is_alnum(s[j])) ++j;
      std::string word(s.substr(i, j - i));
      const bool ascii_param = word == "a" || word == "b" || word == "c";
      out.push_back({ascii_param ? Tok::param : Tok::ident, word, start});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::lparen; break;
      case ')': k = Tok::rparen; break;
      case ',': k = Tok::comma; break;
      case '+': k = Tok::plus; break;
      case '-': k = Tok::minus; break;
      case '*': k = Tok::star; break;
      case '/': k = Tok::slash; break;
      default: throw ParseError(start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({k, std::string(1, c), start});
    ++i, ++col;
  }
  out.push_back({Tok::end, "", col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ActivationTree parse_all() {
    ActivationTree t = expr();
    if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'");
    return t;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(t.column, t.kind == Tok::end ? "unexpected end of input" : msg);
  }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    ++pos_;
  }

  // expr := term [infix term]
  ActivationTree expr() {
    ActivationTree lhs = term();
    BinaryOp op;
    switch (peek().kind) {
      case Tok::plus: op = BinaryOp::add; break;
      case Tok::minus: op = BinaryOp::sub; break;
      case Tok::star: op = BinaryOp::mul; break;
      case Tok::slash: op = BinaryOp::div; break;
      default: return lhs;
    }
    ++pos_;
    ActivationTree rhs = term();
    return ActivationTree::binary(op, lhs, rhs);
  }

  // term := [param '*'] primary
  ActivationTree term() {
    if (peek().kind == Tok::param) {
      ++pos_;
      expect(Tok::star, "'*' after parameter");
      return primary().with_output_param();
    }
    return primary();
  }

  ActivationTree primary() {
    const Token& t = peek();
    if (t.kind == Tok::lparen) {
      ++pos_;
      ActivationTree inner = expr();
      expect(Tok::rparen, "')'");
      return inner;
    }
    if (t.kind == Tok::minus && peek(1).kind == Tok::ident && peek(1).text == "x") {
      pos_ += 2;
      return ActivationTree::unary(UnaryOp::negate);
    }
    if (t.kind != Tok::ident) fail("expected an operand");
    if (t.text == "x") {
      ++pos_;
      return ActivationTree::unary(UnaryOp::identity);
    }
    if (t.text == "max" || t.text == "min") {
      const BinaryOp op = t.text == "max" ? BinaryOp::max : BinaryOp::min;
      ++pos_;
      expect(Tok::lparen, "'('");
      ActivationTree lhs = expr();
      expect(Tok::comma, "','");
      ActivationTree rhs = expr();
      expect(Tok::rparen, "')'");
      return ActivationTree::binary(op, lhs, rhs);
    }
    const auto op = unary_from_name(t.text);
    if (!op) fail("unknown operator '" + t.text + "'");
    ++pos_;
    expect(Tok::lparen, "'('");
    ActivationTree node = argument(*op);
    expect(Tok::rparen, "')'");
    return node;
  }

  // The argument of a unary call is either the variable (optionally scaled)
  // or a nested expression.
  ActivationTree argument(UnaryOp op) {
    const std::size_t save = pos_;
    bool scaled = false;
    if (peek().kind == Tok::param && peek(1).kind == Tok::star) {
      scaled = true;
      pos_ += 2;
    }
    if (peek().kind == Tok::ident && peek().text == "x" && peek(1).kind == Tok::rparen) {
      ++pos_;
      ActivationTree leaf = ActivationTree::unary(op);
      return scaled ? leaf.with_leaf_param() : leaf;
    }
    pos_ = save;
    return ActivationTree::unary(op, expr());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Infix text with function-call syntax; parameters are named α, β, γ in
/// order of appearance (a, b, c with `ascii`).
inline std::string canonical_string(const ActivationTree& tree, bool ascii = false) {
  if (tree.empty()) return "";
  return detail::Printer(tree, ascii).node(0, false);
}

inline ActivationTree parse(std::string_view text) {
  return detail::Parser(detail::tokenize(text)).parse_all();
}

}  // namespace pinnevo::exprtree
