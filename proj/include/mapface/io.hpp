#pragma once

#include "rational.hpp"

#include <boost/version.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mapface {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a, 64 bit, as 16 hex digits.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Shortest text that reads back to the same double.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline std::string fmt(long long x) { return std::to_string(x); }
inline std::string fmt(unsigned long long x) { return std::to_string(x); }
inline std::string fmt(int x) { return std::to_string(x); }
inline std::string fmt(unsigned x) { return std::to_string(x); }
inline std::string fmt(unsigned long x) { return std::to_string(x); }
inline std::string fmt(const std::string& s) { return s; }
inline std::string fmt(const char* s) { return s; }
inline std::string fmt(const BigInt& v) { return v.str(); }
inline std::string fmt(const Rational& r) { return to_string(r); }

struct RunManifest {
  std::string subcommand;
  std::vector<std::string> args;  // output-relevant arguments only
  std::uint64_t seed = 0;
  bool has_seed = false;

  nlohmann::json to_json(const std::string& output_digest) const {
    nlohmann::json j{{"subcommand", subcommand},
                     {"args", args},
                     {"version", kVersion},
                     {"boost", BOOST_LIB_VERSION},
                     {"compiler", __VERSION__},
                     {"digest", output_digest}};
    if (has_seed) j["seed"] = seed;
    else j["seed"] = nullptr;
    return j;
  }
};

// CSV with a header row; comment lines start with '#'. The manifest line is
// appended last and carries the digest of everything above it.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { line(header); }

  template <class... T>
  void row(const T&... cells) {
    std::vector<std::string> v{fmt(cells)...};
    if (v.size() != columns_) throw std::logic_error("CSV row width does not match header");
    line(v);
  }

  void comment(const std::string& text) { body_ << "# " << text << '\n'; }

  std::string finish(const RunManifest& m) const {
    const std::string body = body_.str();
    return body + "# manifest: " + m.to_json(digest(body)).dump() + '\n';
  }

 private:
  static std::string escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + '"';
  }
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) body_ << (i ? "," : "") << escape(cells[i]);
    body_ << '\n';
  }

  std::size_t columns_;
  std::ostringstream body_;
};

// {"result": ..., "manifest": ...}; the digest covers result.dump().
inline std::string json_document(const nlohmann::json& result, const RunManifest& m) {
  const std::string body = result.dump();
  nlohmann::json doc{{"result", result}, {"manifest", m.to_json(digest(body))}};
  return doc.dump(2) + '\n';
}

}  // namespace mapface
