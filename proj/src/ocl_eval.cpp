#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <json.hpp>

#include "regpipe/ocl.hpp"
#include "regpipe/text.hpp"

namespace regpipe::ocl {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "Pass";
    case Outcome::Fail: return "Fail";
    case Outcome::Invalid: return "Invalid";
  }
  return "Invalid";
}

std::string describe(const Value& value) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Undefined>) return "undefined";
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) return text::format_real(x);
        else if constexpr (std::is_same_v<T, std::string>) return "'" + x + "'";
        else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, ObjectRef>) return "@" + x.id;
        else {
          std::string out = "[";
          for (std::size_t i = 0; i < x.items.size(); ++i) out += (i ? ", " : "") + describe(x.items[i]);
          return out + "]";
        }
      },
      value.v);
}

bool CheckReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.outcome == Outcome::Pass; });
}

namespace {

struct TypeError {
  std::string message;
};

[[noreturn]] void type_error(std::string message) { throw TypeError{std::move(message)}; }

const char* kind_name(const Value& v) {
  static constexpr const char* kNames[] = {"Undefined", "Int", "Real", "String", "Bool", "Object", "Collection"};
  return kNames[v.v.index()];
}

bool is_numeric(const Value& v) {
  return std::holds_alternative<long long>(v.v) || std::holds_alternative<double>(v.v);
}

double as_real(const Value& v) {
  if (const auto* i = std::get_if<long long>(&v.v)) return static_cast<double>(*i);
  return std::get<double>(v.v);
}

// Three-valued logic: nullopt is Undefined.
using Tri = std::optional<bool>;

Tri as_tri(const Value& v, const char* where) {
  if (v.undefined()) return std::nullopt;
  if (const auto* b = std::get_if<bool>(&v.v)) return *b;
  type_error(std::string(where) + " expects Bool, got " + kind_name(v));
}

Value from_tri(Tri t) { return t ? Value(*t) : Value(Undefined{}); }

Tri tri_and(Tri a, Tri b) {
  if (a == false || b == false) return false;
  if (a && b) return true;
  return std::nullopt;
}

Tri tri_or(Tri a, Tri b) {
  if (a == true || b == true) return true;
  if (a && b) return false;
  return std::nullopt;
}

Tri equals(const Value& a, const Value& b) {
  if (a.undefined() || b.undefined()) return std::nullopt;
  if (is_numeric(a) && is_numeric(b)) {
    if (std::holds_alternative<long long>(a.v) && std::holds_alternative<long long>(b.v)) {
      return std::get<long long>(a.v) == std::get<long long>(b.v);
    }
    return as_real(a) == as_real(b);
  }
  if (a.v.index() != b.v.index()) {
    type_error(std::string("cannot compare ") + kind_name(a) + " with " + kind_name(b));
  }
  if (const auto* ca = std::get_if<Collection>(&a.v)) {
    const auto& cb = std::get<Collection>(b.v);
    if (ca->items.size() != cb.items.size()) return false;
    Tri acc = true;
    for (std::size_t i = 0; i < ca->items.size(); ++i) acc = tri_and(acc, equals(ca->items[i], cb.items[i]));
    return acc;
  }
  return a == b;
}

Value arithmetic(BinaryOp op, const Value& a, const Value& b) {
  if (a.undefined() || b.undefined()) return Undefined{};
  if (!is_numeric(a) || !is_numeric(b)) {
    type_error(std::string("'") + std::string(spelling(op)) + "' on " + kind_name(a) + " and " + kind_name(b));
  }
  if (op == BinaryOp::Div) {
    const double d = as_real(b);
    if (d == 0.0) return Undefined{};
    const double r = as_real(a) / d;
    return std::isfinite(r) ? Value(r) : Value(Undefined{});
  }
  if (std::holds_alternative<long long>(a.v) && std::holds_alternative<long long>(b.v)) {
    const long long x = std::get<long long>(a.v);
    const long long y = std::get<long long>(b.v);
    long long r = 0;
    bool overflow = false;
    switch (op) {
      case BinaryOp::Add: overflow = __builtin_add_overflow(x, y, &r); break;
      case BinaryOp::Sub: overflow = __builtin_sub_overflow(x, y, &r); break;
      default: overflow = __builtin_mul_overflow(x, y, &r); break;
    }
    return overflow ? Value(Undefined{}) : Value(r);
  }
  const double x = as_real(a);
  const double y = as_real(b);
  double r = 0.0;
  switch (op) {
    case BinaryOp::Add: r = x + y; break;
    case BinaryOp::Sub: r = x - y; break;
    default: r = x * y; break;
  }
  return std::isfinite(r) ? Value(r) : Value(Undefined{});
}

Value ordering(BinaryOp op, const Value& a, const Value& b) {
  if (a.undefined() || b.undefined()) return Undefined{};
  if (!is_numeric(a) || !is_numeric(b)) {
    type_error(std::string("'") + std::string(spelling(op)) + "' needs numbers, got " + kind_name(a) + " and " +
               kind_name(b));
  }
  bool r;
  if (std::holds_alternative<long long>(a.v) && std::holds_alternative<long long>(b.v)) {
    const long long x = std::get<long long>(a.v), y = std::get<long long>(b.v);
    r = op == BinaryOp::Lt ? x < y : op == BinaryOp::Le ? x <= y : op == BinaryOp::Gt ? x > y : x >= y;
  } else {
    const double x = as_real(a), y = as_real(b);
    r = op == BinaryOp::Lt ? x < y : op == BinaryOp::Le ? x <= y : op == BinaryOp::Gt ? x > y : x >= y;
  }
  return r;
}

struct Frame {
  Value self;
  std::vector<Value> slots;
};

using Code = std::function<Value(Frame&)>;

// Compiles an expression tree into nested closures. Variables resolve to
// frame slots at compile time; feature lookups happen per evaluation.
class Compiler {
 public:
  Compiler(const mm::ModelInstance& inst, const mm::MetaModel& mm) : inst_(inst), mm_(mm) {}

  Code compile(const Expr& e) {
    return std::visit([&](const auto& n) { return compile_node(n); }, e.node);
  }
  std::size_t slot_count() const { return max_slots_; }

 private:
  Code compile_node(const SelfExpr&) {
    return [](Frame& f) { return f.self; };
  }
  Code compile_node(const VarExpr& n) {
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i] == n.name) return [i](Frame& f) { return f.slots[i]; };
    }
    return [name = n.name](Frame&) -> Value { type_error("unbound variable " + name); };
  }
  Code compile_node(const IntLit& n) {
    return [v = n.value](Frame&) { return Value(v); };
  }
  Code compile_node(const RealLit& n) {
    return [v = n.value](Frame&) { return Value(v); };
  }
  Code compile_node(const StringLit& n) {
    return [v = n.value](Frame&) { return Value(v); };
  }
  Code compile_node(const BoolLit& n) {
    return [v = n.value](Frame&) { return Value(v); };
  }

  Code compile_node(const UnaryExpr& n) {
    Code operand = compile(*n.operand);
    if (n.op == UnaryOp::Not) {
      return [operand](Frame& f) {
        Tri t = as_tri(operand(f), "not");
        return t ? Value(!*t) : Value(Undefined{});
      };
    }
    return [operand](Frame& f) -> Value {
      Value v = operand(f);
      if (v.undefined()) return Undefined{};
      if (const auto* i = std::get_if<long long>(&v.v)) {
        if (*i == std::numeric_limits<long long>::min()) return Undefined{};
        return -*i;
      }
      if (const auto* d = std::get_if<double>(&v.v)) return -*d;
      type_error(std::string("unary '-' on ") + kind_name(v));
    };
  }

  Code compile_node(const BinaryExpr& n) {
    Code lhs = compile(*n.lhs);
    Code rhs = compile(*n.rhs);
    switch (n.op) {
      case BinaryOp::And:
        return [lhs, rhs](Frame& f) {
          Tri a = as_tri(lhs(f), "and");
          Tri b = as_tri(rhs(f), "and");
          return from_tri(tri_and(a, b));
        };
      case BinaryOp::Or:
        return [lhs, rhs](Frame& f) {
          Tri a = as_tri(lhs(f), "or");
          Tri b = as_tri(rhs(f), "or");
          return from_tri(tri_or(a, b));
        };
      case BinaryOp::Implies:
        return [lhs, rhs](Frame& f) {
          Tri a = as_tri(lhs(f), "implies");
          Tri b = as_tri(rhs(f), "implies");
          return from_tri(tri_or(a ? Tri(!*a) : std::nullopt, b));
        };
      case BinaryOp::Eq:
        return [lhs, rhs](Frame& f) {
          Value a = lhs(f);
          Value b = rhs(f);
          return from_tri(equals(a, b));
        };
      case BinaryOp::Ne:
        return [lhs, rhs](Frame& f) {
          Value a = lhs(f);
          Value b = rhs(f);
          Tri t = equals(a, b);
          return t ? Value(!*t) : Value(Undefined{});
        };
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        return [op = n.op, lhs, rhs](Frame& f) {
          Value a = lhs(f);
          Value b = rhs(f);
          return ordering(op, a, b);
        };
      default:
        return [op = n.op, lhs, rhs](Frame& f) {
          Value a = lhs(f);
          Value b = rhs(f);
          return arithmetic(op, a, b);
        };
    }
  }

  Value navigate_one(const Value& src, const std::string& feature) const {
    if (src.undefined()) return Undefined{};
    const auto* ref = std::get_if<ObjectRef>(&src.v);
    if (ref == nullptr) type_error("navigation '." + feature + "' on " + kind_name(src));
    const mm::Object* obj = inst_.find(ref->id);
    if (obj == nullptr) return Undefined{};
    if (mm_.find(obj->class_name) == nullptr) type_error("object " + obj->id + " has unknown class " + obj->class_name);
    if (const mm::Attribute* attr = mm_.find_attribute(obj->class_name, feature)) {
      auto raw = obj->attributes.find(feature);
      if (raw == obj->attributes.end()) return Undefined{};
      auto coerced = mm::coerce(raw->second, attr->type);
      if (!coerced) return Undefined{};
      return std::visit([](const auto& x) { return Value(x); }, *coerced);
    }
    if (const mm::Reference* r = mm_.find_reference(obj->class_name, feature)) {
      auto link = obj->links.find(feature);
      if (r->many()) {
        Collection out;
        if (link != obj->links.end()) {
          for (const auto& t : link->second.targets) out.items.emplace_back(ObjectRef{t});
        }
        return out;
      }
      if (link == obj->links.end() || link->second.targets.size() != 1) return Undefined{};
      return ObjectRef{link->second.targets.front()};
    }
    type_error(obj->class_name + " has no feature '" + feature + "'");
  }

  Code compile_node(const NavExpr& n) {
    Code source = compile(*n.source);
    return [this, source, feature = n.feature](Frame& f) -> Value {
      Value src = source(f);
      const auto* coll = std::get_if<Collection>(&src.v);
      if (coll == nullptr) return navigate_one(src, feature);
      // Implicit collect, flattening collection-valued results one level.
      Collection out;
      for (const Value& item : coll->items) {
        Value v = navigate_one(item, feature);
        if (v.undefined()) return Undefined{};
        if (auto* inner = std::get_if<Collection>(&v.v)) {
          for (auto& x : inner->items) out.items.push_back(std::move(x));
        } else {
          out.items.push_back(std::move(v));
        }
      }
      return out;
    };
  }

  Code compile_node(const CollectionExpr& n) {
    Code source = compile(*n.source);
    Code arg;
    std::size_t slot = scope_.size();
    if (is_iterator(n.op)) {
      scope_.push_back(n.variable);
      max_slots_ = std::max(max_slots_, scope_.size());
      arg = compile(*n.argument);
      scope_.pop_back();
    } else if (n.argument) {
      arg = compile(*n.argument);
    }
    const CollectionOp op = n.op;
    return [source, arg, slot, op](Frame& f) -> Value {
      Value src = source(f);
      if (src.undefined()) return Undefined{};
      Collection items;
      if (auto* c = std::get_if<Collection>(&src.v)) items = std::move(*c);
      else items.items.push_back(std::move(src));
      const auto& xs = items.items;

      switch (op) {
        case CollectionOp::Size:
          return static_cast<long long>(xs.size());
        case CollectionOp::IsEmpty:
          return xs.empty();
        case CollectionOp::NotEmpty:
          return !xs.empty();
        case CollectionOp::Includes: {
          Value needle = arg(f);
          if (needle.undefined()) return Undefined{};
          Tri acc = false;
          for (const Value& x : xs) acc = tri_or(acc, equals(x, needle));
          return from_tri(acc);
        }
        case CollectionOp::Sum: {
          Value total = 0LL;
          for (const Value& x : xs) {
            if (x.undefined()) return Undefined{};
            if (!is_numeric(x)) type_error(std::string("sum over ") + kind_name(x));
            total = arithmetic(BinaryOp::Add, total, x);
            if (total.undefined()) return Undefined{};
          }
          return total;
        }
        default:
          break;
      }

      std::vector<Value> results;
      results.reserve(xs.size());
      for (const Value& x : xs) {
        f.slots[slot] = x;
        results.push_back(arg(f));
      }
      switch (op) {
        case CollectionOp::ForAll: {
          Tri acc = true;
          for (const Value& r : results) acc = tri_and(acc, as_tri(r, "forAll"));
          return from_tri(acc);
        }
        case CollectionOp::Exists: {
          Tri acc = false;
          for (const Value& r : results) acc = tri_or(acc, as_tri(r, "exists"));
          return from_tri(acc);
        }
        case CollectionOp::Select: {
          Collection out;
          bool undefined = false;
          for (std::size_t i = 0; i < xs.size(); ++i) {
            Tri keep = as_tri(results[i], "select");
            if (!keep) undefined = true;
            else if (*keep) out.items.push_back(xs[i]);
          }
          if (undefined) return Undefined{};
          return out;
        }
        default: {  // Collect
          Collection out;
          for (Value& r : results) {
            if (r.undefined()) return Undefined{};
            out.items.push_back(std::move(r));
          }
          return out;
        }
      }
    };
  }

  const mm::ModelInstance& inst_;
  const mm::MetaModel& mm_;
  std::vector<std::string> scope_;
  std::size_t max_slots_ = 0;
};

}  // namespace

Evaluation Evaluator::evaluate(const Expr& expr, std::string_view self_id) const {
  Compiler compiler(inst_, mm_);
  Code code = compiler.compile(expr);
  Frame frame{ObjectRef{std::string(self_id)}, std::vector<Value>(compiler.slot_count())};
  try {
    return {code(frame), std::nullopt};
  } catch (const TypeError& e) {
    return {Undefined{}, e.message};
  }
}

Verdict Evaluator::evaluate(const Constraint& constraint, std::string_view self_id) const {
  Verdict verdict;
  verdict.object_id = std::string(self_id);
  verdict.constraint = constraint.name.value_or(constraint.context_class);
  Evaluation r = evaluate(*constraint.body, self_id);
  if (r.type_error) {
    verdict.outcome = Outcome::Invalid;
    verdict.diagnostic = "type error: " + *r.type_error;
  } else if (const auto* b = std::get_if<bool>(&r.value.v)) {
    verdict.outcome = *b ? Outcome::Pass : Outcome::Fail;
  } else if (r.value.undefined()) {
    verdict.outcome = Outcome::Invalid;
    verdict.diagnostic = "evaluates to undefined";
  } else {
    verdict.outcome = Outcome::Invalid;
    verdict.diagnostic = std::string("type error: invariant yields ") + kind_name(r.value);
  }
  return verdict;
}

Verdict evaluate(const Constraint& constraint, std::string_view object_id, const mm::ModelInstance& inst,
                 const mm::MetaModel& mm) {
  return Evaluator(inst, mm).evaluate(constraint, object_id);
}

std::string constraint_label(const Constraint& c, std::size_t index) {
  return c.name ? *c.name : c.context_class + "#" + std::to_string(index + 1);
}

CheckReport check_all(const std::vector<Constraint>& constraints, const mm::ModelInstance& inst,
                      const mm::MetaModel& mm) {
  for (const auto& c : constraints) {
    if (mm.find(c.context_class) == nullptr) {
      throw OclError(OclErrc::UnknownContextClass, c.context_class);
    }
  }
  CheckReport report;
  Evaluator evaluator(inst, mm);
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const Constraint& c = constraints[i];
    for (const auto& [id, obj] : inst.objects) {
      if (!mm.conforms(obj.class_name, c.context_class)) continue;
      Verdict v = evaluator.evaluate(c, id);
      v.constraint = constraint_label(c, i);
      ++report.summary[v.outcome];
      report.verdicts.push_back(std::move(v));
    }
  }
  return report;
}

std::string format_report_text(const CheckReport& report) {
  std::string out;
  for (const auto& v : report.verdicts) {
    out += v.constraint + "\t" + v.object_id + "\t" + std::string(to_string(v.outcome));
    if (!v.diagnostic.empty()) out += "\t" + v.diagnostic;
    out += "\n";
  }
  out += "summary";
  for (Outcome o : {Outcome::Pass, Outcome::Fail, Outcome::Invalid}) {
    auto it = report.summary.find(o);
    out += " " + std::string(to_string(o)) + "=" + std::to_string(it == report.summary.end() ? 0 : it->second);
  }
  return out + "\n";
}

std::string format_report_json(const CheckReport& report) {
  nlohmann::ordered_json j;
  j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : report.verdicts) {
    nlohmann::ordered_json e;
    e["constraint"] = v.constraint;
    e["object"] = v.object_id;
    e["outcome"] = to_string(v.outcome);
    if (!v.diagnostic.empty()) e["diagnostic"] = v.diagnostic;
    j["verdicts"].push_back(std::move(e));
  }
  nlohmann::ordered_json summary;
  for (Outcome o : {Outcome::Pass, Outcome::Fail, Outcome::Invalid}) {
    auto it = report.summary.find(o);
    summary[std::string(to_string(o))] = it == report.summary.end() ? 0 : it->second;
  }
  j["summary"] = summary;
  return j.dump(2) + "\n";
}

}  // namespace regpipe::ocl
