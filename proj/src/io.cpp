#include "conoshock/io.hpp"

#include <cstdio>
#include <fstream>

#include "conoshock/errors.hpp"
#include "conoshock/numerics.hpp"

namespace conoshock {

ArtifactWriter::ArtifactWriter(const std::filesystem::path& dir) : dir_(dir) {
  std::filesystem::create_directories(dir_);
}

void ArtifactWriter::write_text(const std::string& name,
                                const std::string& content) {
  std::ofstream out(dir_ / name, std::ios::binary);
  if (!out) throw SolverError("cannot write artifact: " + name);
  out << content;
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(content.data(), content.size())));
  entries_.push_back({name, content.size(), hex});
}

void ArtifactWriter::finish() {
  std::string m = "{\n  \"artifacts\": [\n";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    m += "    {\"name\": \"" + entries_[i].name +
         "\", \"size\": " + std::to_string(entries_[i].size) +
         ", \"fnv1a64\": \"" + entries_[i].hash + "\"}";
    m += (i + 1 < entries_.size()) ? ",\n" : "\n";
  }
  m += "  ]\n}\n";
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  out << m;
}

}  // namespace conoshock
