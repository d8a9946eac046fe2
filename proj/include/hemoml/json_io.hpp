#pragma once

// Deterministic JSON/CSV emission and atomic file writes. Doubles are
// printed with 17 significant digits (exact round trip); emission order is
// fixed so identical inputs produce byte-identical files.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hemoml {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

inline void json_append_escaped(std::string& out, std::string_view s) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

/// Tiny append-only JSON builder; the caller controls key order.
class JsonBuf {
public:
  JsonBuf& begin_object() { return sep().raw_char('{').push(); }
  JsonBuf& end_object() { return pop().raw_char('}'); }
  JsonBuf& begin_array() { return sep().raw_char('[').push(); }
  JsonBuf& end_array() { return pop().raw_char(']'); }

  JsonBuf& key(std::string_view k) {
    sep();
    json_append_escaped(out_, k);
    out_ += ':';
    pending_value_ = true;
    return *this;
  }
  JsonBuf& value(double v) { return sep().raw(format_double(v)); }
  JsonBuf& value(std::uint64_t v) { return sep().raw(std::to_string(v)); }
  JsonBuf& value(std::int64_t v) { return sep().raw(std::to_string(v)); }
  JsonBuf& value(int v) { return sep().raw(std::to_string(v)); }
  JsonBuf& value(bool v) { return sep().raw(v ? "true" : "false"); }
  JsonBuf& value(std::string_view v) {
    sep();
    json_append_escaped(out_, v);
    return *this;
  }

  const std::string& str() const { return out_; }
  std::string take() { return std::move(out_); }

private:
  JsonBuf& sep() {
    if (pending_value_) {
      pending_value_ = false;
      return *this;
    }
    if (!counts_.empty() && counts_.back()++ > 0) out_ += ',';
    return *this;
  }
  JsonBuf& raw(const std::string& s) {
    out_ += s;
    return *this;
  }
  JsonBuf& raw_char(char c) {
    out_ += c;
    return *this;
  }
  JsonBuf& push() {
    counts_.push_back(0);
    return *this;
  }
  JsonBuf& pop() {
    counts_.pop_back();
    return *this;
  }

  std::string out_;
  std::vector<int> counts_;
  bool pending_value_ = false;
};

/// Write-temp-then-rename so interrupted runs never leave truncated files.
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::string& content) {
  const std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace hemoml
