#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regpipe/error.hpp"

namespace regpipe::text {

std::string_view trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view s);
std::vector<std::string_view> split_ws(std::string_view s);
bool starts_with_word(std::string_view line, std::string_view word);
std::string to_lower(std::string_view s);

// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);
std::optional<double> parse_real(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Placeholder substitution for `{{name}}` markers, where name is
// [a-z_][a-z0-9_]*. A multi-line replacement inherits the indentation of the
// line the placeholder sits on. Any placeholder without a binding raises
// TemplateError(UnresolvedPlaceholder).
enum class TemplateErrc { UnresolvedPlaceholder };
using TemplateError = KindedError<TemplateErrc>;

std::vector<std::string> template_placeholders(std::string_view tmpl);
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string, std::less<>>& bindings);

}  // namespace regpipe::text

namespace regpipe {
template <>
std::string_view error_kind_name(text::TemplateErrc kind) noexcept;
}
