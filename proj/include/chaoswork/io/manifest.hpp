#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

namespace chaoswork::io {

namespace fs = std::filesystem;

class FilesystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FilesystemError("cannot read '" + p.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Collects result files written during one run and their checksums.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw FilesystemError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  const fs::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    {
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      if (!out) throw FilesystemError("cannot write '" + p.string() + "'");
      out << content;
      if (!out) throw FilesystemError("write failed for '" + p.string() + "'");
    }
    for (auto& f : files_) {
      if (f.name == name) {
        f.sha256 = sha256_hex(content);
        f.bytes = content.size();
        return;
      }
    }
    files_.push_back({name, sha256_hex(content), content.size()});
  }

  nlohmann::ordered_json file_list() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& f : files_) arr.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    return arr;
  }

  /// Re-reads every file and compares checksums; returns the names that differ.
  std::vector<std::string> verify() const {
    std::vector<std::string> bad;
    for (const auto& f : files_) {
      if (sha256_hex(read_file(dir_ / f.name)) != f.sha256) bad.push_back(f.name);
    }
    return bad;
  }

 private:
  struct File {
    std::string name;
    std::string sha256;
    std::size_t bytes;
  };
  fs::path dir_;
  std::vector<File> files_;
};

}  // namespace chaoswork::io
