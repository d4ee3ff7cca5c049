#include "bbdd/cli/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bbdd/errors.hpp"

namespace bbdd::cli {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row has the wrong width");
  rows.push_back(std::move(row));
}

void Table::prepend_column(Column column, const Cell& value) {
  columns.insert(columns.begin(), std::move(column));
  for (auto& r : rows) r.insert(r.begin(), value);
}

void Table::append(const Table& other) {
  if (columns.empty()) columns = other.columns;
  if (other.columns.size() != columns.size())
    throw std::logic_error("appending a table with different columns");
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name != other.columns[i].name)
      throw std::logic_error("appending a table with different columns");
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::string format_real(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

std::string format_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string quoted = "\"";
    for (char ch : *s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + '"';
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return format_real(std::get<double>(c));
}

void write_csv(std::ostream& out, const Table& table) {
  for (const auto& n : table.notes) out << "# " << n << '\n';
  out << "# units:";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : " ") << table.columns[i].unit;
  out << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i].name;
  out << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_cell(r[i]);
    out << '\n';
  }
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::size_t CsvDocument::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw NotFound("no CSV column named " + name);
}

double CsvDocument::real(std::size_t row, const std::string& name) const {
  return parse_real(rows.at(row).at(column(name)));
}

CsvDocument read_csv(std::istream& in) {
  CsvDocument doc;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# units:", 0) == 0) {
      std::string rest = line.substr(8);
      if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
      doc.units = split_commas(rest);
    } else if (line.rfind('#', 0) == 0) {
      doc.notes.push_back(line.size() > 2 ? line.substr(2) : std::string());
    } else if (doc.header.empty()) {
      doc.header = split_commas(line);
    } else {
      auto cells = split_commas(line);
      if (cells.size() != doc.header.size()) throw std::runtime_error("CSV row has the wrong width");
      doc.rows.push_back(std::move(cells));
    }
  }
  return doc;
}

double parse_real(const std::string& text) {
  double x = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || end != text.data() + text.size())
    throw std::runtime_error("not a number: '" + text + "'");
  return x;
}

}  // namespace bbdd::cli
