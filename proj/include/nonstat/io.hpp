#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nonstat {

// Locale-independent formatting: '.' decimal point, '\n' line endings,
// shortest round-trip doubles. All artifact writers go through here so
// fixtures are bit-exact.
std::string format_double(double x);

struct CsvWriter {
    std::string buffer;
    void header(std::span<const std::string> names);
    void row(std::span<const double> values);
    void raw_row(const std::string& line);
};

// Dense row-major float64 matrix with a 16-byte header:
// magic "NSC1", u32 version, u32 rows, u32 cols (little-endian).
std::string encode_matrix(std::span<const double> values, std::uint32_t rows,
                          std::uint32_t cols);

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64(const std::string& s);
std::string hash_hex(std::uint64_t h);

// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct ArtifactEntry {
    std::string name;
    std::uint64_t bytes = 0;
    std::string hash;  // "fnv1a64:<hex>"
};

// Collects artifacts, writes them atomically under out_dir, and finishes
// with a manifest.json carrying the config echo and all content hashes.
class ArtifactSink {
  public:
    ArtifactSink(std::filesystem::path out_dir, std::string config_echo_json);

    void add(const std::string& name, const std::string& content);
    const std::vector<ArtifactEntry>& entries() const { return entries_; }

    // Returns the manifest path.
    std::filesystem::path finalize(const std::string& results_json = "{}");

  private:
    std::filesystem::path out_dir_;
    std::string config_echo_;
    std::vector<ArtifactEntry> entries_;
};

// Re-hashes every file listed in a manifest; returns the names that fail.
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace nonstat
