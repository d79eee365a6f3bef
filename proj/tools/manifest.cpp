#include "manifest.hpp"

#include <filesystem>
#include <fstream>

#include "hanbias/digest.hpp"
#include "hanbias/error.hpp"
#include "hanbias/version.hpp"

namespace hanbias::cli {

Manifest::Manifest(std::string_view command) {
  doc_["version"] = std::string(kVersion);
  doc_["command"] = std::string(command);
}

void Manifest::set(std::string_view key, std::string_view value) {
  doc_[std::string(key)] = std::string(value);
}
void Manifest::set(std::string_view key, const char* value) {
  doc_[std::string(key)] = std::string(value);
}
void Manifest::set(std::string_view key, bool value) {
  doc_[std::string(key)] = value;
}
void Manifest::set(std::string_view key, std::int64_t value) {
  doc_[std::string(key)] = value;
}
void Manifest::set(std::string_view key, std::uint64_t value) {
  doc_[std::string(key)] = value;
}
void Manifest::set(std::string_view key, double value) {
  doc_[std::string(key)] = value;
}

void Manifest::add_input(std::string_view label, const std::string& path) {
  const std::string base = "input." + std::string(label);
  doc_[base + ".path"] = path;
  doc_[base + ".digest"] = file_digest_hex(path);
}

void Manifest::add_output(std::string_view label, const std::string& path) {
  doc_["output." + std::string(label)] = path;
  outputs_.emplace_back(std::string(label), path);
}

void Manifest::add_timing(std::string_view stage, double seconds) {
  doc_["timing." + std::string(stage) + "_seconds"] = seconds;
}

void Manifest::save(const std::string& path) const {
  for (const auto& [label, file] : outputs_)
    if (!std::filesystem::exists(file))
      throw Error("manifest output '" + label + "' missing on disk: " + file);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << doc_.dump(2) << '\n').flush())
    throw Error("cannot write manifest: " + path);
}

}  // namespace hanbias::cli
