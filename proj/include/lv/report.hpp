#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace lv {

/// 17 significant digits: doubles round-trip bit-faithfully through the text
/// outputs.
std::string fmt17(double v);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

using ReportValue = std::variant<std::int64_t, double, std::string, bool>;

/// Flat key-value record; keys keep insertion order so emitted files are
/// byte-stable.
class Record {
 public:
  Record& add(const std::string& key, double v);
  Record& add(const std::string& key, std::int64_t v);
  Record& add(const std::string& key, int v) { return add(key, static_cast<std::int64_t>(v)); }
  Record& add(const std::string& key, std::uint64_t v);
  Record& add(const std::string& key, const std::string& v);
  Record& add(const std::string& key, const char* v) { return add(key, std::string(v)); }
  Record& add(const std::string& key, bool v);

  const std::vector<std::pair<std::string, ReportValue>>& items() const {
    return items_;
  }

 private:
  std::vector<std::pair<std::string, ReportValue>> items_;
};

std::string to_json_line(const Record& r);

/// Writes one JSON object per line.
void write_ndjson(const std::string& path, const std::vector<Record>& records);

/// Writes a CSV with the union of keys of the first record (missing values
/// empty).
void write_csv(const std::string& path, const std::vector<Record>& records);

}  // namespace lv
