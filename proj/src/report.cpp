#include "lv/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lv/errors.hpp"

namespace lv {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Record& Record::add(const std::string& key, double v) {
  items_.emplace_back(key, v);
  return *this;
}
Record& Record::add(const std::string& key, std::int64_t v) {
  items_.emplace_back(key, v);
  return *this;
}
Record& Record::add(const std::string& key, std::uint64_t v) {
  items_.emplace_back(key, static_cast<std::int64_t>(v));
  return *this;
}
Record& Record::add(const std::string& key, const std::string& v) {
  items_.emplace_back(key, v);
  return *this;
}
Record& Record::add(const std::string& key, bool v) {
  items_.emplace_back(key, v);
  return *this;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 4);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string value_to_json(const ReportValue& v) {
  if (std::holds_alternative<double>(v)) {
    const double d = std::get<double>(v);
    // NDJSON numbers must stay parseable; non-finite values become strings.
    if (!std::isfinite(d)) return "\"" + fmt17(d) + "\"";
    return fmt17(d);
  }
  if (std::holds_alternative<std::int64_t>(v))
    return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return "\"" + json_escape(std::get<std::string>(v)) + "\"";
}

std::string value_to_csv(const ReportValue& v) {
  if (std::holds_alternative<double>(v)) return fmt17(std::get<double>(v));
  if (std::holds_alternative<std::int64_t>(v))
    return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "1" : "0";
  std::string s = std::get<std::string>(v);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string to_json_line(const Record& r) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : r.items()) {
    if (!first) out += ",";
    first = false;
    out += "\"" + json_escape(k) + "\":" + value_to_json(v);
  }
  out += "}";
  return out;
}

void write_ndjson(const std::string& path, const std::vector<Record>& records) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  for (const auto& r : records) os << to_json_line(r) << "\n";
  if (!os) throw DataError("write failed: " + path);
}

void write_csv(const std::string& path, const std::vector<Record>& records) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  if (records.empty()) return;
  bool first = true;
  for (const auto& [k, v] : records.front().items()) {
    (void)v;
    if (!first) os << ",";
    first = false;
    os << k;
  }
  os << "\n";
  for (const auto& r : records) {
    first = true;
    for (const auto& [k, v] : r.items()) {
      (void)k;
      if (!first) os << ",";
      first = false;
      os << value_to_csv(v);
    }
    os << "\n";
  }
  if (!os) throw DataError("write failed: " + path);
}

}  // namespace lv
