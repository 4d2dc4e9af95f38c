#pragma once

// Shared pieces of the text and JSON reports.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cwb/intervals/interval.hpp"

namespace cwb::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kTool = "cwb";
inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchema = 1;

enum ExitCode : int { kOk = 0, kInputError = 1, kBudgetExceeded = 2, kUnproved = 3 };

enum class Format { Text, Json };

struct Report {
  std::string out;  // stdout
  std::string err;  // stderr
  int exit_code = kOk;
};

/// Bad files, bad flags, programs outside a method's fragment.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Left-aligned columns separated by two spaces; no trailing blanks.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) : rows_{std::move(header)} {}

  void add(std::vector<std::string> row) {
    row.resize(rows_.front().size());
    rows_.push_back(std::move(row));
  }

  std::string render() const {
    std::vector<size_t> width(rows_.front().size(), 0);
    for (const auto& r : rows_)
      for (size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    std::string out;
    for (const auto& r : rows_) {
      std::string line;
      for (size_t c = 0; c < r.size(); ++c) {
        line += r[c];
        if (c + 1 < r.size()) line += std::string(width[c] - r[c].size() + 2, ' ');
      }
      line.erase(line.find_last_not_of(' ') + 1);
      out += line + "\n";
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

/// Finite bounds as numbers, infinities as "-oo" / "+oo".
inline Json to_json(const Bound& b) {
  if (b.is_finite()) return b.value();
  return b.str();
}

/// null for the empty interval.
inline Json to_json(const Interval& i) {
  if (i.is_bottom()) return nullptr;
  Json j;
  j["lo"] = to_json(i.lo());
  j["hi"] = to_json(i.hi());
  return j;
}

/// Deterministic work counters per phase, plus wall-clock milliseconds when
/// requested (which makes the output run-dependent).
class Phases {
 public:
  explicit Phases(bool wall_time) : wall_time_(wall_time) {}

  template <typename F>
  auto time(const std::string& phase, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record_ms(phase, start);
    } else {
      auto r = f();
      record_ms(phase, start);
      return r;
    }
  }

  void steps(const std::string& phase, size_t n) { entry(phase).steps += n; }

  Json json() const {
    Json j = Json::object();
    for (const auto& e : entries_) {
      Json p;
      p["steps"] = e.steps;
      if (wall_time_) p["ms"] = e.ms;
      j[e.name] = p;
    }
    return j;
  }

  std::string text() const {
    std::string out = "steps:";
    for (const auto& e : entries_) out += " " + e.name + "=" + std::to_string(e.steps);
    if (wall_time_) {
      out += "\ntime:";
      for (const auto& e : entries_) {
        std::ostringstream ms;
        ms.precision(3);
        ms << std::fixed << e.ms;
        out += " " + e.name + "=" + ms.str() + "ms";
      }
    }
    return out + "\n";
  }

 private:
  struct Entry {
    std::string name;
    size_t steps = 0;
    double ms = 0;
  };

  Entry& entry(const std::string& name) {
    for (auto& e : entries_)
      if (e.name == name) return e;
    entries_.push_back({name});
    return entries_.back();
  }

  void record_ms(const std::string& phase, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double, std::milli> d = std::chrono::steady_clock::now() - start;
    entry(phase).ms += d.count();
  }

  bool wall_time_;
  std::vector<Entry> entries_;
};

inline Json header_json(const std::string& analysis, const std::string& method, const std::string& input) {
  Json j;
  j["schema"] = kSchema;
  j["tool"] = kTool;
  j["version"] = kVersion;
  j["analysis"] = analysis;
  j["method"] = method;
  j["input"] = input;
  return j;
}

}  // namespace cwb::report
