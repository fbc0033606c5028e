#include "trollmap/csv.hpp"

#include <cctype>

#include "trollmap/error.hpp"

namespace trollmap::csv {

std::optional<Record> Reader::next() {
  std::string line;
  while (true) {
    if (!std::getline(in_, line)) return std::nullopt;
    ++line_;
    if (first_) {
      first_ = false;
      if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    break;
  }

  Record record;
  record.line = line_;
  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (!in_quotes) break;
      // Quoted field continues on the next physical line.
      std::string continuation;
      if (!std::getline(in_, continuation)) {
        throw SchemaError("unterminated quoted field starting on line " +
                          std::to_string(record.line));
      }
      ++line_;
      if (!continuation.empty() && continuation.back() == '\r') continuation.pop_back();
      field.push_back('\n');
      line = std::move(continuation);
      i = 0;
      continue;
    }
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == delimiter_) {
      record.fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '"' && field.empty() && !was_quoted) {
      in_quotes = true;
      was_quoted = true;
    } else {
      field.push_back(c);
    }
    ++i;
  }
  record.fields.push_back(std::move(field));
  return record;
}

char delimiter_for_path(std::string_view path) {
  auto ends_with_ci = [&](std::string_view suffix) {
    if (path.size() < suffix.size()) return false;
    for (std::size_t i = 0; i < suffix.size(); ++i) {
      const char a = static_cast<char>(
          std::tolower(static_cast<unsigned char>(path[path.size() - suffix.size() + i])));
      if (a != suffix[i]) return false;
    }
    return true;
  };
  return (ends_with_ci(".tsv") || ends_with_ci(".tab")) ? '\t' : ',';
}

std::string escape(std::string_view field, char delimiter) {
  const bool needs_quotes = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                            std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << delimiter;
    out << escape(fields[i], delimiter);
  }
  out << '\n';
}

std::string normalize_header(std::string_view name) {
  std::string out;
  for (const char c : trim(name)) {
    if (c == '_' || c == ' ' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string_view trim(std::string_view text) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::vector<std::string> parse_list_cell(std::string_view cell) {
  cell = trim(cell);
  if (cell.size() >= 2 && cell.front() == '[' && cell.back() == ']') {
    cell = cell.substr(1, cell.size() - 2);
  }
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= cell.size()) {
    const std::size_t comma = cell.find(',', start);
    std::string_view token =
        trim(cell.substr(start, comma == std::string_view::npos ? cell.npos : comma - start));
    if (token.size() >= 2 && (token.front() == '\'' || token.front() == '"') &&
        token.back() == token.front()) {
      token = trim(token.substr(1, token.size() - 2));
    }
    if (!token.empty()) tokens.emplace_back(token);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return tokens;
}

}  // namespace trollmap::csv
