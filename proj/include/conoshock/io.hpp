#ifndef CONOSHOCK_IO_HPP
#define CONOSHOCK_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace conoshock {

/// Writes artifacts under an output directory and records a manifest with
/// name, size and content hash.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const std::filesystem::path& dir);
  void write_text(const std::string& name, const std::string& content);
  void finish();  // emits manifest.json

 private:
  struct Entry {
    std::string name;
    std::size_t size;
    std::string hash;
  };
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

}  // namespace conoshock

#endif
