#include "crossreg/io/records.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crossreg::io {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

int RecordTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void write_records(const std::string& path, const RecordTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << table.header[i] << (i + 1 == table.header.size() ? '\n' : '\t');
  }
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw std::invalid_argument("record row width does not match header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 == row.size() ? '\n' : '\t');
    }
  }
  if (!out) throw std::runtime_error("error writing " + path);
}

RecordTable read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  RecordTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty records file: " + path);
  table.header = split_tabs(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_tabs(line);
    if (row.size() != table.header.size()) {
      throw std::runtime_error("ragged record row in " + path);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace crossreg::io
