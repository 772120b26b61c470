#pragma once

#include <string>
#include <vector>

namespace crossreg::io {

/// Tab-separated records with a header line.
struct RecordTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

void write_records(const std::string& path, const RecordTable& table);

RecordTable read_records(const std::string& path);

}  // namespace crossreg::io
