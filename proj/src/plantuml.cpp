#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "regpipe/mmcore.hpp"
#include "regpipe/text.hpp"

namespace regpipe::mm {

namespace {

[[noreturn]] void syntax(std::size_t line, const std::string& reason) {
  throw MmError(MmErrc::SyntaxError, "line " + std::to_string(line) + ": " + reason);
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Cursor over one relation line.
struct LineScanner {
  std::string_view s;
  std::size_t pos = 0;
  std::size_t lineno = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  std::string identifier() {
    skip_ws();
    std::size_t start = pos;
    if (pos < s.size() && (std::isalpha(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
      while (pos < s.size() && ident_char(s[pos])) ++pos;
    }
    if (pos == start) syntax(lineno, "expected identifier");
    return std::string(s.substr(start, pos - start));
  }
  std::optional<std::string> quoted() {
    skip_ws();
    if (pos >= s.size() || s[pos] != '"') return std::nullopt;
    std::size_t end = s.find('"', pos + 1);
    if (end == std::string_view::npos) syntax(lineno, "unterminated multiplicity string");
    std::string out(s.substr(pos + 1, end - pos - 1));
    pos = end + 1;
    return out;
  }
  bool consume(std::string_view token) {
    skip_ws();
    if (s.substr(pos, token.size()) == token) {
      pos += token.size();
      return true;
    }
    return false;
  }
};

void parse_multiplicity(std::string_view m, std::size_t lineno, unsigned& lower, UpperBound& upper) {
  m = text::trim(m);
  if (m == "*") {
    lower = 0;
    upper.reset();
    return;
  }
  auto dots = m.find("..");
  auto lo = text::parse_int(dots == std::string_view::npos ? m : m.substr(0, dots));
  if (!lo || *lo < 0) syntax(lineno, "bad multiplicity '" + std::string(m) + "'");
  lower = static_cast<unsigned>(*lo);
  if (dots == std::string_view::npos) {
    if (lower == 0) syntax(lineno, "multiplicity upper bound must be positive");
    upper = lower;
    return;
  }
  auto hi_text = m.substr(dots + 2);
  if (hi_text == "*") {
    upper.reset();
    return;
  }
  auto hi = text::parse_int(hi_text);
  if (!hi || *hi < 1 || *hi < *lo) syntax(lineno, "bad multiplicity '" + std::string(m) + "'");
  upper = static_cast<unsigned>(*hi);
}

struct PendingRelation {
  std::size_t lineno;
  std::string from;
  std::string to;
};

void parse_attribute(std::string_view line, std::size_t lineno, MetaClass& cls) {
  auto colon = line.find(':');
  if (colon == std::string_view::npos) syntax(lineno, "attribute needs 'name : Type'");
  auto name = text::trim(line.substr(0, colon));
  auto rest = text::split_ws(line.substr(colon + 1));
  if (name.empty() || !std::all_of(name.begin(), name.end(), ident_char) ||
      std::isdigit(static_cast<unsigned char>(name[0]))) {
    syntax(lineno, "bad attribute name '" + std::string(name) + "'");
  }
  if (rest.empty() || rest.size() > 2) syntax(lineno, "attribute needs 'name : Type [mult]'");
  auto type = attr_type_from(rest[0]);
  if (!type) throw MmError(MmErrc::UnknownType, "line " + std::to_string(lineno) + ": " + std::string(rest[0]));
  bool required = true;
  if (rest.size() == 2) {
    if (rest[1] == "[0..1]") required = false;
    else if (rest[1] != "[1]") syntax(lineno, "attribute multiplicity must be [1] or [0..1]");
  }
  cls.attributes.push_back({std::string(name), *type, required});
}

}  // namespace

MetaModel parse_plantuml(std::string_view src) {
  std::map<std::string, MetaClass> classes;
  std::map<std::string, std::string> supertypes;  // subclass -> superclass
  std::vector<PendingRelation> inheritance;
  std::vector<std::pair<PendingRelation, Reference>> references;

  enum class State { BeforeStart, Body, InClass, AfterEnd } state = State::BeforeStart;
  MetaClass* open = nullptr;
  std::size_t lineno = 0;

  const auto class_body_line = [&](std::string_view content) {
    // Returns true when the class block closes on this line.
    auto close = content.find('}');
    auto attr = text::trim(close == std::string_view::npos ? content : content.substr(0, close));
    if (!attr.empty()) parse_attribute(attr, lineno, *open);
    if (close == std::string_view::npos) return false;
    if (!text::trim(content.substr(close + 1)).empty()) syntax(lineno, "text after '}'");
    return true;
  };

  for (const std::string& raw : text::split_lines(src)) {
    ++lineno;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '\'') continue;
    switch (state) {
      case State::BeforeStart:
        if (!text::starts_with_word(line, "@startuml")) syntax(lineno, "expected @startuml");
        state = State::Body;
        continue;
      case State::AfterEnd:
        syntax(lineno, "content after @enduml");
      case State::InClass:
        if (class_body_line(line)) state = State::Body;
        continue;
      case State::Body:
        break;
    }
    if (line == "@enduml") {
      state = State::AfterEnd;
      continue;
    }
    if (text::starts_with_word(line, "class")) {
      LineScanner sc{line, 5, lineno};
      std::string name = sc.identifier();
      if (classes.count(name)) syntax(lineno, "duplicate class " + name);
      open = &classes.emplace(name, MetaClass{name, std::nullopt, {}, {}}).first->second;
      if (sc.done()) continue;
      if (!sc.consume("{")) syntax(lineno, "expected '{' after class name");
      if (!class_body_line(line.substr(sc.pos))) state = State::InClass;
      continue;
    }

    LineScanner sc{line, 0, lineno};
    std::string left = sc.identifier();
    auto left_mult = sc.quoted();
    enum class Arrow { Inherit, Assoc, Compose } arrow;
    if (sc.consume("<|--")) arrow = Arrow::Inherit;
    else if (sc.consume("-->")) arrow = Arrow::Assoc;
    else if (sc.consume("*--")) arrow = Arrow::Compose;
    else syntax(lineno, "unsupported PlantUML construct");
    auto right_mult = sc.quoted();
    std::string right = sc.identifier();
    PendingRelation rel{lineno, left, right};

    if (arrow == Arrow::Inherit) {
      if (left_mult || right_mult || !sc.done()) syntax(lineno, "inheritance takes no multiplicity or label");
      if (supertypes.count(right)) syntax(lineno, right + " already has a supertype");
      supertypes.emplace(right, left);
      inheritance.push_back(rel);
      continue;
    }
    if (!sc.consume(":")) syntax(lineno, "association needs ': name'");
    std::string ref_name = sc.identifier();
    if (!sc.done()) syntax(lineno, "unexpected text after reference name");
    Reference ref{ref_name, right, arrow == Arrow::Compose, 0, 1u};
    if (right_mult) parse_multiplicity(*right_mult, lineno, ref.lower, ref.upper);
    if (left_mult) {
      unsigned l;
      UpperBound u;
      parse_multiplicity(*left_mult, lineno, l, u);  // source side is validated, not stored
    }
    references.emplace_back(rel, std::move(ref));
  }
  if (state == State::BeforeStart) syntax(lineno, "missing @startuml");
  if (state == State::InClass) syntax(lineno, "unterminated class block");
  if (state != State::AfterEnd) syntax(lineno, "missing @enduml");

  // Cycles are reported ahead of undefined names so that "A <|-- B" with
  // "B <|-- A" is an inheritance error even without class declarations.
  for (const auto& [sub, _] : supertypes) {
    std::set<std::string> seen{sub};
    for (auto it = supertypes.find(sub); it != supertypes.end(); it = supertypes.find(it->second)) {
      if (!seen.insert(it->second).second) {
        throw MmError(MmErrc::InheritanceCycle, "inheritance cycle through " + sub);
      }
    }
  }
  for (const auto& rel : inheritance) {
    for (const std::string* n : {&rel.from, &rel.to}) {
      if (!classes.count(*n)) {
        throw MmError(MmErrc::UndefinedClassInRelation, "line " + std::to_string(rel.lineno) + ": " + *n);
      }
    }
  }
  for (const auto& [rel, _] : references) {
    for (const std::string* n : {&rel.from, &rel.to}) {
      if (!classes.count(*n)) {
        throw MmError(MmErrc::UndefinedClassInRelation, "line " + std::to_string(rel.lineno) + ": " + *n);
      }
    }
  }
  for (const auto& [sub, super] : supertypes) classes.at(sub).supertype = super;
  for (auto& [rel, ref] : references) classes.at(rel.from).references.push_back(std::move(ref));
  return MetaModel(std::move(classes));
}

}  // namespace regpipe::mm
