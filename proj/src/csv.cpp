#include "ctxg/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ctxg/errors.hpp"

namespace ctxg::csvio {

namespace {

// Pulls one logical record (may span physical lines inside quotes).
// Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields,
                 std::size_t& line_no) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;

  enum class State { field_start, unquoted, quoted };
  State state = State::field_start;
  std::string field;
  const std::size_t start_line = line_no;

  while (true) {
    if (c == EOF) {
      if (state == State::quoted) {
        throw ParseError(start_line, 1, "unterminated quoted field");
      }
      break;
    }
    const char ch = static_cast<char>(c);
    switch (state) {
      case State::field_start:
        if (ch == '"') {
          state = State::quoted;
        } else if (ch == ',') {
          fields.emplace_back();
        } else if (ch == '\n') {
          ++line_no;
          fields.push_back(std::move(field));
          return true;
        } else if (ch != '\r') {
          field.push_back(ch);
          state = State::unquoted;
        }
        break;
      case State::unquoted:
        if (ch == ',') {
          fields.push_back(std::move(field));
          field.clear();
          state = State::field_start;
        } else if (ch == '\n') {
          ++line_no;
          fields.push_back(std::move(field));
          return true;
        } else if (ch != '\r') {
          field.push_back(ch);
        }
        break;
      case State::quoted:
        if (ch == '"') {
          if (in.peek() == '"') {
            in.get();
            field.push_back('"');
          } else {
            state = State::unquoted;  // closed; trailing chars tolerated
          }
        } else {
          if (ch == '\n') ++line_no;
          field.push_back(ch);
        }
        break;
    }
    c = in.get();
  }
  fields.push_back(std::move(field));
  return true;
}

bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\n\r") != std::string_view::npos;
}

}  // namespace

Table read_csv(std::istream& in) {
  Table table;
  std::size_t line_no = 1;
  std::vector<std::string> fields;
  if (!read_record(in, fields, line_no)) {
    throw SchemaError("empty file: missing header row");
  }
  table.header = fields;
  std::size_t row_no = 1;
  while (read_record(in, fields, line_no)) {
    ++row_no;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.header.size()) {
      throw RowError(row_no, "expected " +
                                 std::to_string(table.header.size()) +
                                 " fields, got " +
                                 std::to_string(fields.size()));
    }
    table.rows.push_back(fields);
  }
  return table;
}

Table read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV file: " + path);
  return read_csv(in);
}

std::string escape_field(std::string_view field) {
  if (!needs_quoting(field)) return std::string(field);
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
    if (i > 0) out.put(',');
    out << escape_field(fields[i]);
  }
  out.put('\n');
}

void write_csv(std::ostream& out, const Table& table) {
  write_row(out, table.header);
  for (const auto& row : table.rows) write_row(out, row);
}

void write_csv_file(const Table& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write CSV file: " + path);
  write_csv(out, table);
}

}  // namespace ctxg::csvio
