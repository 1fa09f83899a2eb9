#include "regpipe/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <system_error>

namespace regpipe {

template <>
std::string_view error_kind_name(text::TemplateErrc kind) noexcept {
  switch (kind) {
    case text::TemplateErrc::UnresolvedPlaceholder:
      return "UnresolvedPlaceholder";
  }
  return "TemplateError";
}

namespace text {

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

struct Placeholder {
  std::size_t begin;
  std::size_t end;
  std::string_view name;
};

std::vector<Placeholder> scan_placeholders(std::string_view t) {
  std::vector<Placeholder> out;
  std::size_t pos = 0;
  while ((pos = t.find("{{", pos)) != std::string_view::npos) {
    std::size_t i = pos + 2;
    if (i < t.size() && is_ident_start(t[i])) {
      std::size_t j = i;
      while (j < t.size() && is_ident_char(t[j])) ++j;
      if (t.substr(j, 2) == "}}") {
        out.push_back({pos, j + 2, t.substr(i, j - i)});
        pos = j + 2;
        continue;
      }
    }
    pos += 1;
  }
  return out;
}
}  // namespace

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t p = s.find(sep, start);
    if (p == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t p = s.find('\n', start);
    std::size_t end = p == std::string_view::npos ? s.size() : p;
    std::string_view line = s.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool starts_with_word(std::string_view line, std::string_view word) {
  return line.size() >= word.size() && line.substr(0, word.size()) == word &&
         (line.size() == word.size() || is_space(line[word.size()]));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string format_real(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string_view body = s;
  if (body.front() == '+') body.remove_prefix(1);
  if (body.empty()) return std::nullopt;
  double value = 0;
  auto res = std::from_chars(body.data(), body.data() + body.size(), value);
  if (res.ec != std::errc{} || res.ptr != body.data() + body.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string_view body = s;
  if (body.front() == '+') body.remove_prefix(1);
  if (body.empty()) return std::nullopt;
  long long value = 0;
  auto res = std::from_chars(body.data(), body.data() + body.size(), value);
  if (res.ec != std::errc{} || res.ptr != body.data() + body.size()) return std::nullopt;
  return value;
}

std::vector<std::string> template_placeholders(std::string_view tmpl) {
  std::set<std::string, std::less<>> seen;
  std::vector<std::string> names;
  for (const auto& p : scan_placeholders(tmpl)) {
    if (seen.insert(std::string(p.name)).second) names.emplace_back(p.name);
  }
  return names;
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string, std::less<>>& bindings) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& p : scan_placeholders(tmpl)) {
    auto it = bindings.find(p.name);
    if (it == bindings.end()) {
      throw TemplateError(TemplateErrc::UnresolvedPlaceholder,
                          "no binding for {{" + std::string(p.name) + "}}");
    }
    out.append(tmpl.substr(cursor, p.begin - cursor));
    // Indentation = leading whitespace of the template line holding the marker.
    std::size_t line_start = tmpl.rfind('\n', p.begin == 0 ? 0 : p.begin - 1);
    line_start = (line_start == std::string_view::npos || p.begin == 0) ? 0 : line_start + 1;
    std::size_t ind_end = line_start;
    while (ind_end < p.begin && (tmpl[ind_end] == ' ' || tmpl[ind_end] == '\t')) ++ind_end;
    std::string_view indent = tmpl.substr(line_start, ind_end - line_start);
    const std::string& value = it->second;
    for (std::size_t i = 0; i < value.size(); ++i) {
      out.push_back(value[i]);
      if (value[i] == '\n' && i + 1 < value.size() && value[i + 1] != '\n') out.append(indent);
    }
    cursor = p.end;
  }
  out.append(tmpl.substr(cursor));
  return out;
}

}  // namespace text
}  // namespace regpipe
