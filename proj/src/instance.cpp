#include <algorithm>
#include <cctype>
#include <set>

#include "regpipe/mmcore.hpp"
#include "regpipe/text.hpp"

namespace regpipe::mm {

namespace {

// Element tree of the XMI subset: no text content, no namespaces.
struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlElement> children;
  std::size_t line = 0;
};

class XmlReader {
 public:
  explicit XmlReader(std::string_view src) : s_(src) {}

  XmlElement document() {
    skip_misc();
    if (starts("<?xml")) {
      auto end = s_.find("?>", pos_);
      if (end == std::string_view::npos) fail("unterminated XML declaration");
      pos_ = end + 2;
    }
    skip_misc();
    XmlElement root = element();
    skip_misc();
    if (pos_ != s_.size()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw MmError(MmErrc::SyntaxError, "line " + std::to_string(line()) + ": " + why);
  }
  std::size_t line() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) n += s_[i] == '\n';
    return n;
  }
  bool starts(std::string_view t) const { return s_.substr(pos_, t.size()) == t; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (!starts("<!--")) return;
      auto end = s_.find("-->", pos_ + 4);
      if (end == std::string_view::npos) fail("unterminated comment");
      pos_ = end + 3;
    }
  }
  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
  }
  std::string name() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }
  std::string unescape(std::string_view v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] != '&') {
        out.push_back(v[i]);
        continue;
      }
      auto semi = v.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity");
      auto ent = v.substr(i + 1, semi - i - 1);
      if (ent == "lt") out.push_back('<');
      else if (ent == "gt") out.push_back('>');
      else if (ent == "amp") out.push_back('&');
      else if (ent == "quot") out.push_back('"');
      else if (ent == "apos") out.push_back('\'');
      else if (ent.size() > 1 && ent[0] == '#') {
        bool hex = ent[1] == 'x';
        auto digits = ent.substr(hex ? 2 : 1);
        unsigned long code = 0;
        try {
          std::size_t used = 0;
          code = std::stoul(std::string(digits), &used, hex ? 16 : 10);
          if (used != digits.size()) fail("bad character reference");
        } catch (const std::logic_error&) {
          fail("bad character reference");
        }
        if (code < 0x80) {
          out.push_back(static_cast<char>(code));
        } else if (code < 0x800) {
          out.push_back(static_cast<char>(0xC0 | (code >> 6)));
          out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else if (code < 0x10000) {
          out.push_back(static_cast<char>(0xE0 | (code >> 12)));
          out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else if (code < 0x110000) {
          out.push_back(static_cast<char>(0xF0 | (code >> 18)));
          out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else {
          fail("character reference out of range");
        }
      } else {
        fail("unknown entity &" + std::string(ent) + ";");
      }
      i = semi;
    }
    return out;
  }

  XmlElement element() {
    if (!starts("<")) fail("expected '<'");
    XmlElement el;
    el.line = line();
    ++pos_;
    el.name = name();
    std::set<std::string> seen;
    for (;;) {
      skip_ws();
      if (starts("/>")) {
        pos_ += 2;
        return el;
      }
      if (starts(">")) {
        ++pos_;
        break;
      }
      std::string attr = name();
      skip_ws();
      if (!starts("=")) fail("expected '=' after attribute " + attr);
      ++pos_;
      skip_ws();
      if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) fail("expected quoted value");
      char quote = s_[pos_];
      auto end = s_.find(quote, pos_ + 1);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      std::string value = unescape(s_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      if (!seen.insert(attr).second) fail("duplicate attribute " + attr);
      el.attributes.emplace_back(std::move(attr), std::move(value));
    }
    for (;;) {
      skip_misc();
      if (pos_ >= s_.size()) fail("unterminated element <" + el.name + ">");
      if (starts("</")) {
        pos_ += 2;
        std::string closing = name();
        if (closing != el.name) fail("mismatched </" + closing + ">, expected </" + el.name + ">");
        skip_ws();
        if (!starts(">")) fail("expected '>'");
        ++pos_;
        return el;
      }
      if (!starts("<")) fail("text content is not allowed");
      el.children.push_back(element());
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void add_object(const XmlElement& el, const std::string* parent, ModelInstance& inst) {
  if (el.name != "obj") {
    throw MmError(MmErrc::SyntaxError, "line " + std::to_string(el.line) + ": expected <obj>, got <" + el.name + ">");
  }
  Object obj;
  std::optional<std::string> owner;
  for (const auto& [key, value] : el.attributes) {
    if (key == "class") obj.class_name = value;
    else if (key == "id") obj.id = value;
    else if (key == "owner") owner = value;
    else if (key.rfind("ref-", 0) == 0 && key.size() > 4) {
      Link link;
      for (auto t : text::split_ws(value)) link.targets.emplace_back(t);
      obj.links.emplace(key.substr(4), std::move(link));
    } else {
      obj.attributes.emplace(key, value);
    }
  }
  const auto where = "line " + std::to_string(el.line) + ": ";
  if (obj.class_name.empty()) throw MmError(MmErrc::SyntaxError, where + "<obj> without class");
  if (obj.id.empty()) throw MmError(MmErrc::SyntaxError, where + "<obj> without id");
  if (parent != nullptr && !owner) throw MmError(MmErrc::SyntaxError, where + "nested <obj> without owner");
  if (parent == nullptr && owner) throw MmError(MmErrc::SyntaxError, where + "top-level <obj> with owner");
  if (inst.objects.count(obj.id)) throw MmError(MmErrc::DuplicateObjectId, obj.id);

  if (parent != nullptr) {
    Link& link = inst.objects.at(*parent).links[*owner];
    if (!link.targets.empty() && !link.nested) {
      throw MmError(MmErrc::SyntaxError, where + "link '" + *owner + "' is both nested and a ref- attribute");
    }
    link.nested = true;
    link.targets.push_back(obj.id);
  }
  std::string id = obj.id;
  inst.objects.emplace(id, std::move(obj));
  for (const XmlElement& child : el.children) add_object(child, &id, inst);
  for (const auto& [name, link] : inst.objects.at(id).links) {
    if (link.nested && link.targets.empty()) {
      throw MmError(MmErrc::SyntaxError, where + "empty nested link " + name);
    }
  }
}

std::string escape(std::string_view v) {
  std::string out;
  for (char c : v) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\t': out += "&#9;"; break;
      case '\r': out += "&#13;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void write_object(const ModelInstance& inst, const Object& obj, const std::string* owner, std::size_t depth,
                  std::set<std::string>& written, std::string& out) {
  if (!written.insert(obj.id).second) {
    throw MmError(MmErrc::SyntaxError, "object " + obj.id + " is nested more than once");
  }
  const std::string indent(depth, ' ');
  out += indent + "<obj class=\"" + escape(obj.class_name) + "\" id=\"" + escape(obj.id) + "\"";
  if (owner) out += " owner=\"" + escape(*owner) + "\"";
  for (const auto& [k, v] : obj.attributes) out += " " + k + "=\"" + escape(v) + "\"";
  bool has_children = false;
  for (const auto& [name, link] : obj.links) {
    if (link.nested) {
      has_children = has_children || !link.targets.empty();
      continue;
    }
    std::string joined;
    for (const auto& t : link.targets) joined += (joined.empty() ? "" : " ") + t;
    out += " ref-" + name + "=\"" + escape(joined) + "\"";
  }
  if (!has_children) {
    out += "/>\n";
    return;
  }
  out += ">\n";
  for (const auto& [name, link] : obj.links) {
    if (!link.nested) continue;
    for (const auto& t : link.targets) {
      const Object* child = inst.find(t);
      if (child == nullptr) throw MmError(MmErrc::SyntaxError, "nested link to missing object " + t);
      write_object(inst, *child, &name, depth + 1, written, out);
    }
  }
  out += indent + "</obj>\n";
}

bool is_int_literal(std::string_view s) {
  std::size_t i = (!s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

bool is_real_literal(std::string_view s) {
  auto dot = s.find('.');
  if (dot == std::string_view::npos) return is_int_literal(s);
  auto frac = s.substr(dot + 1);
  return is_int_literal(s.substr(0, dot)) && !frac.empty() &&
         std::all_of(frac.begin(), frac.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

const Object* ModelInstance::find(std::string_view id) const {
  auto it = objects.find(std::string(id));
  return it == objects.end() ? nullptr : &it->second;
}

ModelInstance parse_instance(std::string_view text) {
  XmlElement root = XmlReader(text).document();
  if (root.name != "objects") throw MmError(MmErrc::SyntaxError, "root element must be <objects>");
  if (!root.attributes.empty()) throw MmError(MmErrc::SyntaxError, "<objects> takes no attributes");
  ModelInstance inst;
  for (const XmlElement& el : root.children) add_object(el, nullptr, inst);
  return inst;
}

std::string serialize_instance(const ModelInstance& inst) {
  std::set<std::string> nested_ids;
  for (const auto& [_, obj] : inst.objects) {
    for (const auto& [__, link] : obj.links) {
      if (link.nested) nested_ids.insert(link.targets.begin(), link.targets.end());
    }
  }
  std::string out = "<objects>\n";
  std::set<std::string> written;
  for (const auto& [id, obj] : inst.objects) {
    if (!nested_ids.count(id)) write_object(inst, obj, nullptr, 1, written, out);
  }
  if (written.size() != inst.objects.size()) {
    throw MmError(MmErrc::SyntaxError, "nested links contain a cycle; instance has no tree serialization");
  }
  out += "</objects>\n";
  return out;
}

std::optional<AttrValue> coerce(std::string_view raw, AttrType type) {
  switch (type) {
    case AttrType::String:
      return AttrValue{std::string(raw)};
    case AttrType::Int:
      if (!is_int_literal(raw)) return std::nullopt;
      if (auto v = text::parse_int(raw)) return AttrValue{*v};
      return std::nullopt;
    case AttrType::Real:
      if (!is_real_literal(raw)) return std::nullopt;
      if (auto v = text::parse_real(raw)) return AttrValue{*v};
      return std::nullopt;
    case AttrType::Bool:
      if (raw == "true") return AttrValue{true};
      if (raw == "false") return AttrValue{false};
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace regpipe::mm
