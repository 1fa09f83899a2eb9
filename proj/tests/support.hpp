#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace regpipe::testing {

inline std::filesystem::path fixtures_dir() { return REGPIPE_FIXTURES_DIR; }

inline std::string fixture(const std::string& name) {
  std::ifstream in(fixtures_dir() / name, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace regpipe::testing
