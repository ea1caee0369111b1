#ifndef CTXG_CSV_HPP
#define CTXG_CSV_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ctxg::csvio {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC-4180: quoted fields, doubled-quote escapes, embedded commas and
// newlines; tolerates CRLF. Throws ParseError on an unterminated quote and
// RowError when a data row's field count differs from the header's.
Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

std::string escape_field(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);
void write_csv(std::ostream& out, const Table& table);
void write_csv_file(const Table& table, const std::string& path);

}  // namespace ctxg::csvio

#endif  // CTXG_CSV_HPP
