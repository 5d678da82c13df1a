#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace fns2d {

// Flat key=value configuration. Keys outside the known set are rejected so a
// typo cannot silently fall back to a default.
class RunConfig {
 public:
  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> k = {"hurst",   "cutoff", "dt",     "t_final", "seed",       "replicas",
                                            "rho",     "sigma",  "tol",    "threads", "out",        "snap_every",
                                            "lambda",  "m",      "scheme", "amplitude", "criterion", "quick"};
    return k;
  }

  void set(const std::string& key, const std::string& value) {
    require(known_keys().count(key) > 0, "config: unknown key '" + key + "'");
    values_[key] = value;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  // A parse failure names the key and the offending text.
  double number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos > 0 && pos == it->second.size(), "config: " + key + "='" + it->second + "' is not a number");
    return v;
  }

  long integer(const std::string& key, long fallback) const {
    double v = number(key, static_cast<double>(fallback));
    require(v == static_cast<double>(static_cast<long>(v)), "config: " + key + " must be an integer");
    return static_cast<long>(v);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  // Keys in sorted order, one "key=value" per line; "threads" and "out" do not
  // change results and are left out so the hash identifies the computation.
  std::string canonical() const {
    std::string s;
    for (const auto& [k, v] : values_)
      if (k != "threads" && k != "out") s += k + "=" + v + "\n";
    return s;
  }

  // FNV-1a 64 of canonical(), with the subcommand mixed in.
  std::uint64_t hash(const std::string& command) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : command + "\n" + canonical()) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  // Lines "key = value"; '#' starts a comment.
  static RunConfig parse(std::istream& in) {
    RunConfig c;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
      auto trim = [](std::string s) {
        const char* ws = " \t\r";
        s.erase(0, s.find_first_not_of(ws));
        s.erase(s.find_last_not_of(ws) + 1);
        return s;
      };
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      require(eq != std::string::npos, "config line " + std::to_string(no) + ": expected key = value");
      c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "config: cannot open " + path);
    return parse(f);
  }

  // Values in `over` replace ours.
  void merge(const RunConfig& over) {
    for (const auto& [k, v] : over.values_) values_[k] = v;
  }

 private:
  std::map<std::string, std::string> values_;
};

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace fns2d
