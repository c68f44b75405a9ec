#include "stanceval/csv.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "stanceval/errors.hpp"

namespace stanceval::csv {

namespace {

// Splits raw CSV text into records, honoring quoted fields. Returns one
// vector of fields per record together with the 1-based line it started on.
struct RawRecord {
  std::vector<std::string> fields;
  std::size_t line;
};

std::vector<RawRecord> split_records(const std::string& text, const std::string& source) {
  std::vector<RawRecord> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back({std::move(fields), record_line});
    fields.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw ValidationError(source + ":" + std::to_string(line) + ": stray quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
        break;
    }
  }
  if (in_quotes)
    throw ValidationError(source + ": unterminated quoted field");
  if (field_started || !field.empty() || !fields.empty()) end_record();
  return records;
}

}  // namespace

std::size_t Table::column(const std::string& name, const std::string& source) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ValidationError(source + ": missing required column '" + name + "'");
}

Table read(std::istream& in, const std::string& source) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  Table table;
  auto records = split_records(text, source);
  std::size_t i = 0;
  // Leading comment lines: a single unquoted field starting with '#'.
  while (i < records.size() && !records[i].fields.empty() &&
         !records[i].fields.front().empty() && records[i].fields.front().front() == '#') {
    std::string joined = records[i].fields.front();
    for (std::size_t f = 1; f < records[i].fields.size(); ++f) joined += "," + records[i].fields[f];
    table.comments.push_back(joined);
    ++i;
  }
  if (i >= records.size())
    throw ValidationError(source + ": missing header row");
  table.header = records[i].fields;
  ++i;
  for (; i < records.size(); ++i) {
    auto& rec = records[i];
    if (rec.fields.size() == 1 && rec.fields.front().empty()) continue;  // blank line
    if (rec.fields.size() != table.header.size())
      throw ValidationError(source + ":" + std::to_string(rec.line) + ": expected " +
                            std::to_string(table.header.size()) + " fields, got " +
                            std::to_string(rec.fields.size()));
    table.rows.push_back(std::move(rec.fields));
  }
  return table;
}

std::string escape(const std::string& field) {
  const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace stanceval::csv
