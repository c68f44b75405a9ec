#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stanceval::csv {

// In-memory CSV table. Leading lines starting with '#' (before the header)
// are preserved as comments; pipeline artifacts use them to carry the config
// hash and seed.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws ValidationError if absent.
  std::size_t column(const std::string& name, const std::string& source) const;
};

// RFC-4180-style reader: quoted fields, embedded commas/quotes/newlines,
// CRLF line endings. Every row must match the header arity. `source` names
// the input in error messages.
Table read(std::istream& in, const std::string& source);

std::string escape(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace stanceval::csv
