#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "regpipe/error.hpp"
#include "regpipe/mmcore.hpp"

namespace regpipe::ocl {

enum class OclErrc { SyntaxError, DuplicateConstraintName, UnknownContextClass };
using OclError = KindedError<OclErrc>;

// ---------------------------------------------------------------- values

struct Value;

struct Undefined {
  friend bool operator==(Undefined, Undefined) { return true; }
};
struct ObjectRef {
  std::string id;
  friend bool operator==(const ObjectRef&, const ObjectRef&) = default;
};
struct Collection {
  std::vector<Value> items;
  friend bool operator==(const Collection&, const Collection&);
};

struct Value {
  std::variant<Undefined, long long, double, std::string, bool, ObjectRef, Collection> v;

  Value() = default;
  Value(Undefined u) : v(u) {}
  Value(int i) : v(static_cast<long long>(i)) {}
  Value(long long i) : v(i) {}
  Value(double d) : v(d) {}
  Value(std::string s) : v(std::move(s)) {}
  Value(const char* s) : v(std::string(s)) {}
  Value(bool b) : v(b) {}
  Value(ObjectRef r) : v(std::move(r)) {}
  Value(Collection c) : v(std::move(c)) {}

  bool undefined() const { return std::holds_alternative<Undefined>(v); }
  friend bool operator==(const Value&, const Value&) = default;
};

inline bool operator==(const Collection& a, const Collection& b) { return a.items == b.items; }

std::string describe(const Value& value);

// ------------------------------------------------------------------- AST

enum class UnaryOp { Not, Neg };
enum class BinaryOp { Implies, Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div };
enum class CollectionOp { Size, IsEmpty, NotEmpty, Includes, Sum, ForAll, Exists, Select, Collect };

std::string_view spelling(BinaryOp op);
std::string_view spelling(CollectionOp op);
bool is_iterator(CollectionOp op);
bool takes_argument(CollectionOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct SelfExpr {};
struct VarExpr {
  std::string name;
};
struct IntLit {
  long long value;
};
struct RealLit {
  double value;
};
struct StringLit {
  std::string value;
};
struct BoolLit {
  bool value;
};
struct UnaryExpr {
  UnaryOp op;
  ExprPtr operand;
};
struct BinaryExpr {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct NavExpr {
  ExprPtr source;
  std::string feature;
};
// `source->op(...)`. Iterators bind `variable` in `argument`; `includes`
// uses `argument` alone; the rest take neither.
struct CollectionExpr {
  ExprPtr source;
  CollectionOp op;
  std::string variable;
  ExprPtr argument;
};

struct Expr {
  std::variant<SelfExpr, VarExpr, IntLit, RealLit, StringLit, BoolLit, UnaryExpr, BinaryExpr, NavExpr,
               CollectionExpr>
      node;
  std::size_t offset = 0;  // source position, 0 for synthesized nodes
};

template <typename Node>
ExprPtr make_expr(Node node, std::size_t offset = 0) {
  return std::make_shared<const Expr>(Expr{std::move(node), offset});
}

bool structurally_equal(const Expr& a, const Expr& b);

struct Constraint {
  std::string context_class;
  std::optional<std::string> name;
  ExprPtr body;
};

// ---------------------------------------------------------------- parsing

// `context C inv [Name]: <expr>` declarations; `--` starts a line comment.
std::vector<Constraint> parse_ocl(std::string_view text);
ExprPtr parse_expression(std::string_view text, const std::vector<std::string>& bound = {});

// Minimal-parenthesis rendering that parses back to an equal tree.
std::string to_string(const Expr& expr);
std::string to_string(const Constraint& c);
std::string to_string(const std::vector<Constraint>& constraints);

// ------------------------------------------------------------- evaluation

enum class Outcome { Pass, Fail, Invalid };
std::string_view to_string(Outcome o);

struct Verdict {
  std::string constraint;  // name, or "<Context>#<n>" for unnamed ones
  std::string object_id;
  Outcome outcome = Outcome::Invalid;
  std::string diagnostic;  // set for Invalid verdicts
};

struct CheckReport {
  std::vector<Verdict> verdicts;
  std::map<Outcome, std::size_t> summary;
  bool all_pass() const;
};

// Evaluates `expr` with `self` bound to `object_id`. Type errors surface as
// `Invalid` outcomes; this never throws for well-formed inputs.
struct Evaluation {
  Value value;
  std::optional<std::string> type_error;
};

class Evaluator {
 public:
  Evaluator(const mm::ModelInstance& inst, const mm::MetaModel& mm) : inst_(inst), mm_(mm) {}

  Evaluation evaluate(const Expr& expr, std::string_view self_id) const;
  Verdict evaluate(const Constraint& constraint, std::string_view self_id) const;

 private:
  const mm::ModelInstance& inst_;
  const mm::MetaModel& mm_;
};

Verdict evaluate(const Constraint& constraint, std::string_view object_id, const mm::ModelInstance& inst,
                 const mm::MetaModel& mm);

std::string constraint_label(const Constraint& c, std::size_t index);

CheckReport check_all(const std::vector<Constraint>& constraints, const mm::ModelInstance& inst,
                      const mm::MetaModel& mm);

std::string format_report_text(const CheckReport& report);
std::string format_report_json(const CheckReport& report);

}  // namespace regpipe::ocl

namespace regpipe {
template <>
std::string_view error_kind_name(ocl::OclErrc kind) noexcept;
}
