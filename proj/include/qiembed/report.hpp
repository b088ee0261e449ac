#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qiembed/errors.hpp"
#include "qiembed/rational.hpp"

namespace qiembed {

using Value = std::variant<bool, std::int64_t, double, std::string>;

/// Ordered key-value map; insertion order is the serialization order.
class Record {
 public:
  Record() = default;
  Record(std::initializer_list<std::pair<std::string, Value>> init) : items_(init) {}

  Record& set(const std::string& key, Value v) {
    for (auto& [k, old] : items_)
      if (k == key) {
        old = std::move(v);
        return *this;
      }
    items_.emplace_back(key, std::move(v));
    return *this;
  }
  Record& set(const std::string& key, bool v) { return set(key, Value(v)); }
  Record& set(const std::string& key, double v) { return set(key, Value(v)); }
  Record& set(const std::string& key, int v) { return set(key, Value(static_cast<std::int64_t>(v))); }
  Record& set(const std::string& key, long v) { return set(key, Value(static_cast<std::int64_t>(v))); }
  Record& set(const std::string& key, long long v) { return set(key, Value(static_cast<std::int64_t>(v))); }
  Record& set(const std::string& key, unsigned v) { return set(key, Value(static_cast<std::int64_t>(v))); }
  Record& set(const std::string& key, unsigned long v) { return set(key, Value(static_cast<std::int64_t>(v))); }
  Record& set(const std::string& key, unsigned long long v) { return set(key, Value(static_cast<std::int64_t>(v))); }
  Record& set(const std::string& key, std::string v) { return set(key, Value(std::move(v))); }
  Record& set(const std::string& key, const char* v) { return set(key, Value(std::string(v))); }
  Record& set(const std::string& key, const Rational& v) { return set(key, Value(v.str())); }

  const Value* find(const std::string& key) const {
    for (const auto& [k, v] : items_)
      if (k == key) return &v;
    return nullptr;
  }
  double number(const std::string& key) const {
    const Value* v = find(key);
    if (!v) throw NotFound("no field " + key);
    if (auto d = std::get_if<double>(v)) return *d;
    if (auto i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
    throw ParseError("field " + key + " is not numeric");
  }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  friend bool operator==(const Record&, const Record&) = default;

 private:
  std::vector<std::pair<std::string, Value>> items_;
};

/// Machine-readable outcome of one certification run.
namespace detail {

inline std::int64_t elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

struct VerificationReport {
  std::string check_name;
  Record parameters;
  bool pass = false;
  Record constants;
  std::vector<Record> witnesses;
  std::vector<Record> rows;  // tabular detail such as per-bin statistics
  std::int64_t runtime_ms = 0;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

enum class Format { json, csv, text };

inline std::optional<Format> parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "text") return Format::text;
  return std::nullopt;
}

namespace detail {

inline std::string format_double(double d) {
  if (std::isnan(d)) return "\"NaN\"";
  if (std::isinf(d)) return d > 0 ? "\"Infinity\"" : "\"-Infinity\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

inline std::string value_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) return format_double(x);
        else return json_string(x);
      },
      v);
}

inline std::string value_plain(const Value& v) {
  if (auto s = std::get_if<std::string>(&v)) return *s;
  std::string s = value_json(v);
  if (s.front() == '"') return s.substr(1, s.size() - 2);
  return s;
}

inline void record_json(std::ostringstream& os, const Record& r) {
  os << '{';
  bool first = true;
  for (const auto& [k, v] : r) {
    if (!first) os << ',';
    first = false;
    os << json_string(k) << ':' << value_json(v);
  }
  os << '}';
}

inline void records_json(std::ostringstream& os, const std::vector<Record>& rs, const char* indent) {
  if (rs.empty()) {
    os << "[]";
    return;
  }
  os << "[\n";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    os << indent << "  ";
    record_json(os, rs[i]);
    os << (i + 1 < rs.size() ? ",\n" : "\n");
  }
  os << indent << ']';
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string record_inline(const Record& r) {
  std::string s;
  for (const auto& [k, v] : r) {
    if (!s.empty()) s += ' ';
    s += k + '=' + value_plain(v);
  }
  return s;
}

inline Value value_from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ParseError("unsupported JSON value in report");
}

inline Record record_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  Record r;
  for (const auto& [k, v] : j.items()) r.set(k, value_from_json(v));
  return r;
}

}  // namespace detail

inline std::string emit_json(const std::vector<VerificationReport>& reports) {
  if (reports.empty()) return "[]";
  std::ostringstream os;
  os << "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    os << "  {\n";
    os << "    \"check_name\": " << detail::json_string(r.check_name) << ",\n";
    os << "    \"parameters\": ";
    detail::record_json(os, r.parameters);
    os << ",\n    \"pass\": " << (r.pass ? "true" : "false") << ",\n";
    os << "    \"constants\": ";
    detail::record_json(os, r.constants);
    os << ",\n    \"witnesses\": ";
    detail::records_json(os, r.witnesses, "    ");
    os << ",\n    \"rows\": ";
    detail::records_json(os, r.rows, "    ");
    os << ",\n    \"runtime_ms\": " << r.runtime_ms << "\n  }" << (i + 1 < reports.size() ? "," : "") << "\n";
  }
  os << "]";
  return os.str();
}

/// One row per (check, row) and (check, witness); fields packed as key=value.
inline std::string emit_csv(const std::vector<VerificationReport>& reports) {
  std::ostringstream os;
  os << "check_name,pass,kind,index,fields\n";
  for (const auto& r : reports) {
    const char* pass = r.pass ? "true" : "false";
    os << detail::csv_field(r.check_name) << ',' << pass << ",constants,0,"
       << detail::csv_field(detail::record_inline(r.constants)) << '\n';
    for (std::size_t i = 0; i < r.rows.size(); ++i)
      os << detail::csv_field(r.check_name) << ',' << pass << ",row," << i << ','
         << detail::csv_field(detail::record_inline(r.rows[i])) << '\n';
    for (std::size_t i = 0; i < r.witnesses.size(); ++i)
      os << detail::csv_field(r.check_name) << ',' << pass << ",witness," << i << ','
         << detail::csv_field(detail::record_inline(r.witnesses[i])) << '\n';
  }
  return os.str();
}

inline std::string emit_text(const std::vector<VerificationReport>& reports) {
  std::ostringstream os;
  for (const auto& r : reports) {
    os << (r.pass ? "PASS " : "FAIL ") << r.check_name << '\n';
    if (!r.parameters.empty()) os << "  parameters: " << detail::record_inline(r.parameters) << '\n';
    if (!r.constants.empty()) os << "  constants:  " << detail::record_inline(r.constants) << '\n';
    for (const auto& w : r.witnesses) os << "  witness:    " << detail::record_inline(w) << '\n';
  }
  return os.str();
}

inline std::string emit(const std::vector<VerificationReport>& reports, Format f) {
  switch (f) {
    case Format::json: return emit_json(reports);
    case Format::csv: return emit_csv(reports);
    case Format::text: return emit_text(reports);
  }
  return {};
}

/// Inverse of emit_json.
inline std::vector<VerificationReport> parse_reports(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  if (!j.is_array()) throw ParseError("expected a JSON array of reports");
  std::vector<VerificationReport> out;
  for (const auto& o : j) {
    VerificationReport r;
    r.check_name = o.at("check_name").get<std::string>();
    r.parameters = detail::record_from_json(o.at("parameters"));
    r.pass = o.at("pass").get<bool>();
    r.constants = detail::record_from_json(o.at("constants"));
    for (const auto& w : o.at("witnesses")) r.witnesses.push_back(detail::record_from_json(w));
    for (const auto& w : o.at("rows")) r.rows.push_back(detail::record_from_json(w));
    r.runtime_ms = o.at("runtime_ms").get<std::int64_t>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace qiembed
