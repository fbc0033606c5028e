#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace trollmap::csv {

// One logical record. `line` is the 1-based physical line the record starts on.
struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// Streaming reader for delimited text. With ',' it follows RFC 4180 quoting
// (quoted fields may embed delimiters, doubled quotes and newlines). TSV input
// is read the same way; quotes rarely occur there but are honored.
// Lines whose first character is '#' outside a record are skipped.
class Reader {
 public:
  Reader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

  // Returns the next record, or nullopt at end of input. Throws SchemaError on
  // an unterminated quoted field.
  std::optional<Record> next();

 private:
  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 0;
  bool first_ = true;
};

// Guesses the delimiter from a file name: ".tsv"/".tab" -> '\t', otherwise ','.
char delimiter_for_path(std::string_view path);

// Quotes the field when it contains the delimiter, a quote, or a line break.
std::string escape(std::string_view field, char delimiter = ',');

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

// Lower-cases and strips '_', ' ' and '-' so that "tweet_id", "TweetId" and
// "tweetid" compare equal.
std::string normalize_header(std::string_view name);

// Parses a bracketed token list such as "[maga, 'trump']". Surrounding quotes
// and whitespace are trimmed from each token; empty tokens are dropped.
std::vector<std::string> parse_list_cell(std::string_view cell);

std::string_view trim(std::string_view text);

}  // namespace trollmap::csv
