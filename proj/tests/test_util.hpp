#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "contracts/rcl.hpp"

namespace testutil {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus(const std::string& name) { return read_file(std::string(CORPUS_DIR) + "/" + name); }
inline std::string data(const std::string& name) { return read_file(std::string(TEST_DATA_DIR) + "/" + name); }

inline contracts::FormulaPtr formula(const std::string& src) {
  auto r = contracts::parse_formula(src);
  if (!r.ok()) {
    std::string msg = "bad formula: " + src;
    for (auto& d : r.diags) msg += "\n  " + contracts::format_diagnostic(d, "<formula>");
    throw std::runtime_error(msg);
  }
  return *r.value;
}

inline contracts::Document document(const std::string& src) {
  auto r = contracts::parse_document(src);
  if (!r.ok()) {
    std::string msg = "bad document";
    for (auto& d : r.diags) msg += "\n  " + contracts::format_diagnostic(d, "<doc>");
    throw std::runtime_error(msg);
  }
  return *r.value;
}

}  // namespace testutil
