#ifndef BBDD_CLI_CSV_HPP_
#define BBDD_CLI_CSV_HPP_

// Result tables and their CSV form: "# " comment lines (settings, then a
// "# units:" line aligned with the columns), a header row, data rows. Reals
// are written in the shortest form that reads back to the same double.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace bbdd::cli {

using Cell = std::variant<std::string, std::int64_t, double>;

struct Column {
  std::string name;
  std::string unit;
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::string> notes;  // written as "# note" before the units line
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  /// Inserts a leading column holding `value` in every row.
  void prepend_column(Column column, const Cell& value);
  /// Appends the rows of `other`, whose columns must match.
  void append(const Table& other);
};

std::string format_real(double x);
std::string format_cell(const Cell& c);

void write_csv(std::ostream& out, const Table& table);
std::string to_csv(const Table& table);

/// Header, units and raw cell text of a CSV produced by write_csv.
struct CsvDocument {
  std::vector<std::string> notes;
  std::vector<std::string> units;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws NotFound
  double real(std::size_t row, const std::string& name) const;
};

CsvDocument read_csv(std::istream& in);
double parse_real(const std::string& text);

}  // namespace bbdd::cli

#endif  // BBDD_CLI_CSV_HPP_
