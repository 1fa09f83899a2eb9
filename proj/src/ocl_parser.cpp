#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "regpipe/ocl.hpp"
#include "regpipe/text.hpp"

namespace regpipe {

template <>
std::string_view error_kind_name(ocl::OclErrc kind) noexcept {
  switch (kind) {
    case ocl::OclErrc::SyntaxError: return "SyntaxError";
    case ocl::OclErrc::DuplicateConstraintName: return "DuplicateConstraintName";
    case ocl::OclErrc::UnknownContextClass: return "UnknownContextClass";
  }
  return "OclError";
}

namespace ocl {

std::string_view spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Implies: return "implies";
    case BinaryOp::Or: return "or";
    case BinaryOp::And: return "and";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "<>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
  }
  return "?";
}

std::string_view spelling(CollectionOp op) {
  switch (op) {
    case CollectionOp::Size: return "size";
    case CollectionOp::IsEmpty: return "isEmpty";
    case CollectionOp::NotEmpty: return "notEmpty";
    case CollectionOp::Includes: return "includes";
    case CollectionOp::Sum: return "sum";
    case CollectionOp::ForAll: return "forAll";
    case CollectionOp::Exists: return "exists";
    case CollectionOp::Select: return "select";
    case CollectionOp::Collect: return "collect";
  }
  return "?";
}

bool is_iterator(CollectionOp op) {
  return op == CollectionOp::ForAll || op == CollectionOp::Exists || op == CollectionOp::Select ||
         op == CollectionOp::Collect;
}

bool takes_argument(CollectionOp op) { return is_iterator(op) || op == CollectionOp::Includes; }

namespace {

enum class Tok {
  Ident, Int, Real, String,
  LParen, RParen, Dot, Arrow, Bar, Colon, Comma,
  Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

const std::set<std::string, std::less<>> kKeywords = {"context", "inv", "self", "and", "or",
                                                      "not", "implies", "true", "false"};

std::string describe_tok(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Real: return "real";
    case Tok::String: return "string";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'->'";
    case Tok::Bar: return "'|'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Eq: return "'='";
    case Tok::Ne: return "'<>'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::End: return "end of input";
  }
  return "token";
}

std::string location(std::string_view src, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < offset && i < src.size(); ++i) {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "offset " + std::to_string(offset) + " (line " + std::to_string(line) + ", column " +
         std::to_string(col) + ")";
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  const auto fail = [&](std::size_t at, const std::string& why) {
    throw OclError(OclErrc::SyntaxError, location(s, at) + ": " + why);
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      bool real = false;
      if (i + 1 < s.size() && s[i] == '.' && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
        real = true;
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          real = true;
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      if (i < s.size() && (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
        fail(i, "malformed number");
      }
      out.push_back({real ? Tok::Real : Tok::Int, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (c == '\'') {
      std::string value;
      ++i;
      for (;;) {
        if (i >= s.size()) fail(start, "unterminated string literal");
        char d = s[i++];
        if (d == '\'') break;
        if (d == '\\') {
          if (i >= s.size()) fail(start, "unterminated string literal");
          char e = s[i++];
          switch (e) {
            case 'n': value.push_back('\n'); break;
            case 't': value.push_back('\t'); break;
            case '\\': value.push_back('\\'); break;
            case '\'': value.push_back('\''); break;
            default: fail(i - 2, std::string("unknown escape \\") + e);
          }
          continue;
        }
        value.push_back(d);
      }
      out.push_back({Tok::String, std::move(value), start});
      continue;
    }
    const auto two = s.substr(i, 2);
    Tok kind;
    std::size_t len = 1;
    if (two == "->") kind = Tok::Arrow, len = 2;
    else if (two == "<>") kind = Tok::Ne, len = 2;
    else if (two == "<=") kind = Tok::Le, len = 2;
    else if (two == ">=") kind = Tok::Ge, len = 2;
    else {
      switch (c) {
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case '.': kind = Tok::Dot; break;
        case '|': kind = Tok::Bar; break;
        case ':': kind = Tok::Colon; break;
        case ',': kind = Tok::Comma; break;
        case '=': kind = Tok::Eq; break;
        case '<': kind = Tok::Lt; break;
        case '>': kind = Tok::Gt; break;
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        default: fail(i, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back({kind, std::string(s.substr(i, len)), i});
    i += len;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token> toks) : src_(src), toks_(std::move(toks)) {}

  std::vector<Constraint> constraints() {
    std::vector<Constraint> out;
    std::set<std::string> names;
    while (peek().kind != Tok::End) {
      expect_keyword("context");
      Constraint c;
      c.context_class = identifier("class name");
      expect_keyword("inv");
      if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
        std::size_t at = peek().offset;
        c.name = next().text;
        if (!names.insert(*c.name).second) {
          throw OclError(OclErrc::DuplicateConstraintName, location(src_, at) + ": " + *c.name);
        }
      }
      expect(Tok::Colon);
      c.body = expression();
      if (peek().kind != Tok::End && !at_keyword("context")) {
        fail({"'context'", "end of input", "operator"});
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  ExprPtr standalone(const std::vector<std::string>& bound) {
    scopes_ = bound;
    ExprPtr e = expression();
    if (peek().kind != Tok::End) fail({"end of input", "operator"});
    return e;
  }

 private:
  static bool is_keyword(std::string_view t) { return kKeywords.count(t) != 0; }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at_keyword(std::string_view kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

  [[noreturn]] void fail(std::initializer_list<std::string> expected) const {
    std::string set;
    for (const auto& e : expected) set += (set.empty() ? "" : ", ") + e;
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw OclError(OclErrc::SyntaxError, location(src_, t.offset) + ": expected {" + set + "}, got " + got);
  }
  void expect(Tok kind) {
    if (peek().kind != kind) fail({describe_tok(kind)});
    ++pos_;
  }
  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail({"'" + std::string(kw) + "'"});
    ++pos_;
  }
  std::string identifier(const std::string& what) {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail({what});
    return next().text;
  }

  ExprPtr expression() { return implies(); }

  template <typename Sub>
  ExprPtr left_assoc(Sub sub, std::initializer_list<std::pair<Tok, BinaryOp>> ops,
                     std::initializer_list<std::pair<std::string_view, BinaryOp>> words) {
    ExprPtr lhs = (this->*sub)();
    for (;;) {
      std::optional<BinaryOp> op;
      for (const auto& [tok, bop] : ops) {
        if (peek().kind == tok) op = bop;
      }
      for (const auto& [word, bop] : words) {
        if (at_keyword(word)) op = bop;
      }
      if (!op) return lhs;
      std::size_t at = next().offset;
      ExprPtr rhs = (this->*sub)();
      lhs = make_expr(BinaryExpr{*op, lhs, rhs}, at);
    }
  }

  ExprPtr implies() { return left_assoc(&Parser::disjunction, {}, {{"implies", BinaryOp::Implies}}); }
  ExprPtr disjunction() { return left_assoc(&Parser::conjunction, {}, {{"or", BinaryOp::Or}}); }
  ExprPtr conjunction() { return left_assoc(&Parser::negation, {}, {{"and", BinaryOp::And}}); }
  ExprPtr negation() {
    if (at_keyword("not")) {
      std::size_t at = next().offset;
      return make_expr(UnaryExpr{UnaryOp::Not, negation()}, at);
    }
    return comparison();
  }
  ExprPtr comparison() {
    return left_assoc(&Parser::additive,
                      {{Tok::Eq, BinaryOp::Eq}, {Tok::Ne, BinaryOp::Ne}, {Tok::Lt, BinaryOp::Lt},
                       {Tok::Le, BinaryOp::Le}, {Tok::Gt, BinaryOp::Gt}, {Tok::Ge, BinaryOp::Ge}},
                      {});
  }
  ExprPtr additive() {
    return left_assoc(&Parser::multiplicative, {{Tok::Plus, BinaryOp::Add}, {Tok::Minus, BinaryOp::Sub}}, {});
  }
  ExprPtr multiplicative() {
    return left_assoc(&Parser::unary, {{Tok::Star, BinaryOp::Mul}, {Tok::Slash, BinaryOp::Div}}, {});
  }
  ExprPtr unary() {
    if (peek().kind == Tok::Minus) {
      std::size_t at = next().offset;
      return make_expr(UnaryExpr{UnaryOp::Neg, unary()}, at);
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    for (;;) {
      if (peek().kind == Tok::Dot) {
        std::size_t at = next().offset;
        if (peek().kind != Tok::Ident) fail({"feature name"});
        e = make_expr(NavExpr{e, next().text}, at);
        continue;
      }
      if (peek().kind == Tok::Arrow) {
        std::size_t at = next().offset;
        e = collection_call(e, at);
        continue;
      }
      return e;
    }
  }

  ExprPtr collection_call(ExprPtr source, std::size_t at) {
    static const std::initializer_list<std::pair<std::string_view, CollectionOp>> kOps = {
        {"size", CollectionOp::Size},         {"isEmpty", CollectionOp::IsEmpty},
        {"notEmpty", CollectionOp::NotEmpty}, {"includes", CollectionOp::Includes},
        {"sum", CollectionOp::Sum},           {"forAll", CollectionOp::ForAll},
        {"exists", CollectionOp::Exists},     {"select", CollectionOp::Select},
        {"collect", CollectionOp::Collect}};
    std::optional<CollectionOp> op;
    if (peek().kind == Tok::Ident) {
      for (const auto& [name, o] : kOps) {
        if (peek().text == name) op = o;
      }
    }
    if (!op) {
      fail({"size", "isEmpty", "notEmpty", "includes", "sum", "forAll", "exists", "select", "collect"});
    }
    ++pos_;
    expect(Tok::LParen);
    CollectionExpr call{std::move(source), *op, {}, nullptr};
    if (is_iterator(*op)) {
      call.variable = identifier("iterator variable");
      expect(Tok::Bar);
      scopes_.push_back(call.variable);
      call.argument = expression();
      scopes_.pop_back();
    } else if (*op == CollectionOp::Includes) {
      call.argument = expression();
    }
    expect(Tok::RParen);
    return make_expr(std::move(call), at);
  }

  ExprPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        long long v = 0;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc{}) {
          throw OclError(OclErrc::SyntaxError, location(src_, t.offset) + ": integer literal out of range");
        }
        ++pos_;
        return make_expr(IntLit{v}, t.offset);
      }
      case Tok::Real: {
        double v = 0;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc{} || !std::isfinite(v)) {
          throw OclError(OclErrc::SyntaxError, location(src_, t.offset) + ": real literal out of range");
        }
        ++pos_;
        return make_expr(RealLit{v}, t.offset);
      }
      case Tok::String:
        ++pos_;
        return make_expr(StringLit{t.text}, t.offset);
      case Tok::LParen: {
        ++pos_;
        ExprPtr e = expression();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Ident: {
        if (t.text == "self") return ++pos_, make_expr(SelfExpr{}, t.offset);
        if (t.text == "true") return ++pos_, make_expr(BoolLit{true}, t.offset);
        if (t.text == "false") return ++pos_, make_expr(BoolLit{false}, t.offset);
        if (!is_keyword(t.text)) {
          for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            if (*it == t.text) return ++pos_, make_expr(VarExpr{t.text}, t.offset);
          }
          throw OclError(OclErrc::SyntaxError,
                         location(src_, t.offset) + ": unbound identifier '" + t.text + "'");
        }
        break;
      }
      default:
        break;
    }
    fail({"self", "variable", "literal", "'('"});
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> scopes_;
};

// ---------------------------------------------------------------- printer

constexpr int kPrecImplies = 1, kPrecOr = 2, kPrecAnd = 3, kPrecNot = 4, kPrecCompare = 5, kPrecAdd = 6,
              kPrecMul = 7, kPrecNeg = 8, kPrecPostfix = 9, kPrecPrimary = 10;

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Implies: return kPrecImplies;
    case BinaryOp::Or: return kPrecOr;
    case BinaryOp::And: return kPrecAnd;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kPrecAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div: return kPrecMul;
    default: return kPrecCompare;
  }
}

int precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, BinaryExpr>) return precedence(n.op);
        else if constexpr (std::is_same_v<N, UnaryExpr>) return n.op == UnaryOp::Not ? kPrecNot : kPrecNeg;
        else if constexpr (std::is_same_v<N, NavExpr> || std::is_same_v<N, CollectionExpr>) return kPrecPostfix;
        else return kPrecPrimary;
      },
      e.node);
}

std::string real_literal(double v) {
  std::string s = text::format_real(v);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string string_literal(const std::string& v) {
  std::string out = "'";
  for (char c : v) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out + "'";
}

void print(const Expr& e, int min_prec, std::string& out);

void print_child(const ExprPtr& e, int min_prec, std::string& out) {
  if (precedence(*e) < min_prec) {
    out.push_back('(');
    print(*e, 0, out);
    out.push_back(')');
  } else {
    print(*e, min_prec, out);
  }
}

void print(const Expr& e, int, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, SelfExpr>) {
          out += "self";
        } else if constexpr (std::is_same_v<N, VarExpr>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, IntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<N, RealLit>) {
          out += real_literal(n.value);
        } else if constexpr (std::is_same_v<N, StringLit>) {
          out += string_literal(n.value);
        } else if constexpr (std::is_same_v<N, BoolLit>) {
          out += n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<N, UnaryExpr>) {
          if (n.op == UnaryOp::Not) {
            out += "not ";
            print_child(n.operand, kPrecNot, out);
          } else {
            out += "-";
            // "--" would open a comment
            const bool nested_neg = std::holds_alternative<UnaryExpr>(n.operand->node) ||
                                    (std::holds_alternative<IntLit>(n.operand->node) &&
                                     std::get<IntLit>(n.operand->node).value < 0) ||
                                    (std::holds_alternative<RealLit>(n.operand->node) &&
                                     std::signbit(std::get<RealLit>(n.operand->node).value));
            print_child(n.operand, nested_neg ? kPrecPrimary + 1 : kPrecNeg, out);
          }
        } else if constexpr (std::is_same_v<N, BinaryExpr>) {
          const int p = precedence(n.op);
          print_child(n.lhs, p, out);
          out += " ";
          out += spelling(n.op);
          out += " ";
          print_child(n.rhs, p + 1, out);
        } else if constexpr (std::is_same_v<N, NavExpr>) {
          print_child(n.source, kPrecPostfix, out);
          out += ".";
          out += n.feature;
        } else if constexpr (std::is_same_v<N, CollectionExpr>) {
          print_child(n.source, kPrecPostfix, out);
          out += "->";
          out += spelling(n.op);
          out += "(";
          if (is_iterator(n.op)) {
            out += n.variable + " | ";
            print(*n.argument, 0, out);
          } else if (n.argument) {
            print(*n.argument, 0, out);
          }
          out += ")";
        }
      },
      e.node);
}

}  // namespace

std::vector<Constraint> parse_ocl(std::string_view text) {
  return Parser(text, lex(text)).constraints();
}

ExprPtr parse_expression(std::string_view text, const std::vector<std::string>& bound) {
  return Parser(text, lex(text)).standalone(bound);
}

std::string to_string(const Expr& expr) {
  std::string out;
  print(expr, 0, out);
  return out;
}

std::string to_string(const Constraint& c) {
  std::string out = "context " + c.context_class + " inv";
  if (c.name) out += " " + *c.name;
  out += ": " + to_string(*c.body);
  return out;
}

std::string to_string(const std::vector<Constraint>& constraints) {
  std::string out;
  for (const auto& c : constraints) out += to_string(c) + "\n";
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const N& y = std::get<N>(b.node);
        if constexpr (std::is_same_v<N, SelfExpr>) return true;
        else if constexpr (std::is_same_v<N, VarExpr>) return x.name == y.name;
        else if constexpr (std::is_same_v<N, IntLit> || std::is_same_v<N, BoolLit> || std::is_same_v<N, StringLit>)
          return x.value == y.value;
        else if constexpr (std::is_same_v<N, RealLit>)
          return x.value == y.value || (std::isnan(x.value) && std::isnan(y.value));
        else if constexpr (std::is_same_v<N, UnaryExpr>)
          return x.op == y.op && structurally_equal(*x.operand, *y.operand);
        else if constexpr (std::is_same_v<N, BinaryExpr>)
          return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) && structurally_equal(*x.rhs, *y.rhs);
        else if constexpr (std::is_same_v<N, NavExpr>)
          return x.feature == y.feature && structurally_equal(*x.source, *y.source);
        else if constexpr (std::is_same_v<N, CollectionExpr>)
          return x.op == y.op && x.variable == y.variable && structurally_equal(*x.source, *y.source) &&
                 (x.argument == nullptr) == (y.argument == nullptr) &&
                 (x.argument == nullptr || structurally_equal(*x.argument, *y.argument));
      },
      a.node);
}

}  // namespace ocl
}  // namespace regpipe
