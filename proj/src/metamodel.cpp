#include "regpipe/mmcore.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "regpipe/text.hpp"

namespace regpipe {

template <>
std::string_view error_kind_name(mm::MmErrc kind) noexcept {
  using mm::MmErrc;
  switch (kind) {
    case MmErrc::SyntaxError: return "SyntaxError";
    case MmErrc::UnknownType: return "UnknownType";
    case MmErrc::UndefinedClassInRelation: return "UndefinedClassInRelation";
    case MmErrc::InheritanceCycle: return "InheritanceCycle";
    case MmErrc::DuplicateObjectId: return "DuplicateObjectId";
  }
  return "MetamodelError";
}

namespace mm {

std::string_view to_string(AttrType t) {
  switch (t) {
    case AttrType::String: return "String";
    case AttrType::Int: return "Int";
    case AttrType::Real: return "Real";
    case AttrType::Bool: return "Bool";
  }
  return "String";
}

std::optional<AttrType> attr_type_from(std::string_view name) {
  if (name == "String") return AttrType::String;
  if (name == "Int") return AttrType::Int;
  if (name == "Real") return AttrType::Real;
  if (name == "Bool") return AttrType::Bool;
  return std::nullopt;
}

std::string multiplicity_str(unsigned lower, UpperBound upper) {
  if (!upper) return std::to_string(lower) + "..*";
  if (*upper == lower) return std::to_string(lower);
  return std::to_string(lower) + ".." + std::to_string(*upper);
}

MetaModel::MetaModel(std::map<std::string, MetaClass> classes) : classes_(std::move(classes)) {
  for (auto& [name, cls] : classes_) {
    if (cls.supertype && !classes_.count(*cls.supertype)) {
      throw MmError(MmErrc::UndefinedClassInRelation,
                    "supertype " + *cls.supertype + " of " + name + " is not defined");
    }
    for (const Reference& r : cls.references) {
      if (!classes_.count(r.target)) {
        throw MmError(MmErrc::UndefinedClassInRelation,
                      "reference " + name + "." + r.name + " targets undefined class " + r.target);
      }
      if (r.upper && (*r.upper == 0 || r.lower > *r.upper)) {
        throw MmError(MmErrc::SyntaxError, "bad multiplicity on " + name + "." + r.name);
      }
    }
    std::sort(cls.attributes.begin(), cls.attributes.end(),
              [](const Attribute& a, const Attribute& b) { return a.name < b.name; });
    std::sort(cls.references.begin(), cls.references.end(),
              [](const Reference& a, const Reference& b) { return a.name < b.name; });
  }
  for (const auto& [name, cls] : classes_) {
    std::set<std::string> chain{name};
    const MetaClass* cur = &cls;
    while (cur->supertype) {
      if (!chain.insert(*cur->supertype).second) {
        throw MmError(MmErrc::InheritanceCycle, "inheritance cycle through " + name);
      }
      cur = &classes_.at(*cur->supertype);
    }
  }
  for (const auto& [name, cls] : classes_) {
    std::set<std::string> seen;
    for (const Attribute* a : all_attributes(name)) {
      if (!seen.insert(a->name).second) {
        throw MmError(MmErrc::SyntaxError, "duplicate feature " + a->name + " in " + name);
      }
    }
    for (const Reference* r : all_references(name)) {
      if (!seen.insert(r->name).second) {
        throw MmError(MmErrc::SyntaxError, "duplicate feature " + r->name + " in " + name);
      }
    }
  }
}

const MetaClass* MetaModel::find(std::string_view name) const {
  auto it = classes_.find(std::string(name));
  return it == classes_.end() ? nullptr : &it->second;
}

bool MetaModel::conforms(std::string_view cls, std::string_view ancestor) const {
  const MetaClass* cur = find(cls);
  while (cur != nullptr) {
    if (cur->name == ancestor) return true;
    cur = cur->supertype ? find(*cur->supertype) : nullptr;
  }
  return false;
}

std::vector<const Attribute*> MetaModel::all_attributes(std::string_view cls) const {
  std::vector<const Attribute*> out;
  for (const MetaClass* cur = find(cls); cur != nullptr; cur = cur->supertype ? find(*cur->supertype) : nullptr) {
    for (const Attribute& a : cur->attributes) out.push_back(&a);
  }
  return out;
}

std::vector<const Reference*> MetaModel::all_references(std::string_view cls) const {
  std::vector<const Reference*> out;
  for (const MetaClass* cur = find(cls); cur != nullptr; cur = cur->supertype ? find(*cur->supertype) : nullptr) {
    for (const Reference& r : cur->references) out.push_back(&r);
  }
  return out;
}

const Attribute* MetaModel::find_attribute(std::string_view cls, std::string_view name) const {
  for (const Attribute* a : all_attributes(cls)) {
    if (a->name == name) return a;
  }
  return nullptr;
}

const Reference* MetaModel::find_reference(std::string_view cls, std::string_view name) const {
  for (const Reference* r : all_references(cls)) {
    if (r->name == name) return r;
  }
  return nullptr;
}

std::string to_canonical(const MetaModel& mm) {
  std::string out = "metamodel\n";
  for (const auto& [name, cls] : mm.classes()) {
    out += "class " + name;
    if (cls.supertype) out += " extends " + *cls.supertype;
    out += "\n";
    std::vector<std::pair<std::string, std::string>> lines;
    for (const Attribute& a : cls.attributes) {
      lines.emplace_back(a.name, "  attr " + a.name + " : " + std::string(to_string(a.type)) +
                                     (a.required ? " [1]" : " [0..1]"));
    }
    for (const Reference& r : cls.references) {
      lines.emplace_back(r.name, std::string("  ") + (r.containment ? "contains " : "ref ") + r.name + " : " +
                                     r.target + " [" + multiplicity_str(r.lower, r.upper) + "]");
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& [_, line] : lines) out += line + "\n";
  }
  return out;
}

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

[[noreturn]] void syntax(std::size_t line, const std::string& reason) {
  throw MmError(MmErrc::SyntaxError, "line " + std::to_string(line) + ": " + reason);
}

// "[l..u]" / "[n]" with u possibly "*".
bool parse_bracket_multiplicity(std::string_view s, unsigned& lower, UpperBound& upper) {
  if (s.size() < 3 || s.front() != '[' || s.back() != ']') return false;
  s = s.substr(1, s.size() - 2);
  auto dots = s.find("..");
  auto lo = text::parse_int(dots == std::string_view::npos ? s : s.substr(0, dots));
  if (!lo || *lo < 0) return false;
  lower = static_cast<unsigned>(*lo);
  if (dots == std::string_view::npos) {
    upper = lower;
    return lower > 0;
  }
  auto hi_text = s.substr(dots + 2);
  if (hi_text == "*") {
    upper.reset();
    return true;
  }
  auto hi = text::parse_int(hi_text);
  if (!hi || *hi < 1 || *hi < *lo) return false;
  upper = static_cast<unsigned>(*hi);
  return true;
}

}  // namespace

MetaModel parse_metamodel(std::string_view src) {
  std::map<std::string, MetaClass> classes;
  MetaClass* current = nullptr;
  bool header = false;
  std::size_t lineno = 0;
  for (const std::string& raw : text::split_lines(src)) {
    ++lineno;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    auto words = text::split_ws(line);
    if (!header) {
      if (line != "metamodel") syntax(lineno, "expected 'metamodel'");
      header = true;
      continue;
    }
    if (words[0] == "class") {
      if (!(words.size() == 2 || (words.size() == 4 && words[2] == "extends"))) syntax(lineno, "malformed class line");
      if (!is_identifier(words[1])) syntax(lineno, "bad class name");
      MetaClass cls;
      cls.name = std::string(words[1]);
      if (words.size() == 4) {
        if (!is_identifier(words[3])) syntax(lineno, "bad supertype name");
        cls.supertype = std::string(words[3]);
      }
      auto [it, inserted] = classes.emplace(cls.name, cls);
      if (!inserted) syntax(lineno, "duplicate class " + cls.name);
      current = &it->second;
      continue;
    }
    if (current == nullptr) syntax(lineno, "feature outside class");
    if (words.size() != 5 || words[2] != ":" || !is_identifier(words[1])) syntax(lineno, "malformed feature");
    if (words[0] == "attr") {
      auto type = attr_type_from(words[3]);
      if (!type) throw MmError(MmErrc::UnknownType, "line " + std::to_string(lineno) + ": " + std::string(words[3]));
      bool required;
      if (words[4] == "[1]") required = true;
      else if (words[4] == "[0..1]") required = false;
      else syntax(lineno, "attribute multiplicity must be [1] or [0..1]");
      current->attributes.push_back({std::string(words[1]), *type, required});
    } else if (words[0] == "ref" || words[0] == "contains") {
      if (!is_identifier(words[3])) syntax(lineno, "bad target class");
      Reference r{std::string(words[1]), std::string(words[3]), words[0] == "contains", 0, 1u};
      if (!parse_bracket_multiplicity(words[4], r.lower, r.upper)) syntax(lineno, "bad multiplicity");
      current->references.push_back(std::move(r));
    } else {
      syntax(lineno, "unknown feature keyword '" + std::string(words[0]) + "'");
    }
  }
  if (!header) syntax(lineno, "missing 'metamodel' header");
  return MetaModel(std::move(classes));
}

MetaModel load_metamodel(std::string_view text) {
  auto body = text::trim(text);
  if (body.substr(0, 9) == "@startuml") return parse_plantuml(text);
  return parse_metamodel(text);
}

}  // namespace mm
}  // namespace regpipe
