#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncshape/text_format.hpp"

namespace ncshape {

/// Minimal ordered JSON object writer. Numbers are emitted with 17
/// significant digits so re-reading reproduces them bit-exactly.
class JsonWriter {
public:
  JsonWriter& field(const std::string& key, double value) { return raw(key, fmt17(value)); }
  JsonWriter& field(const std::string& key, int value) { return raw(key, std::to_string(value)); }
  JsonWriter& field(const std::string& key, long long value) { return raw(key, std::to_string(value)); }
  JsonWriter& field(const std::string& key, unsigned long long value) { return raw(key, std::to_string(value)); }
  JsonWriter& field(const std::string& key, const std::string& value) { return raw(key, quote(value)); }
  JsonWriter& null_field(const std::string& key) { return raw(key, "null"); }

  JsonWriter& field(const std::string& key, const std::vector<double>& values) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) os << ", ";
      os << fmt17(values[i]);
    }
    os << ']';
    return raw(key, os.str());
  }

  std::string str() const {
    std::ostringstream os;
    os << "{\n";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      os << "  " << entries_[i];
      if (i + 1 < entries_.size()) os << ',';
      os << '\n';
    }
    os << "}\n";
    return os.str();
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << str();
    if (!out) throw std::runtime_error("write failed: " + path);
  }

private:
  static std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    out += '"';
    return out;
  }

  JsonWriter& raw(const std::string& key, const std::string& value) {
    entries_.push_back(quote(key) + ": " + value);
    return *this;
  }

  std::vector<std::string> entries_;
};

} // namespace ncshape
