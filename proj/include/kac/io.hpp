#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace kac {

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Writes CSV artifacts into one directory, stamps every file with the shared header
// comments and records it in manifest.csv.
class ArtifactWriter {
public:
    ArtifactWriter(std::string directory, std::vector<std::string> header);

    // Opens <directory>/<name>; the schema line is written first.
    std::ofstream open(const std::string& name, const std::string& schema);
    const std::vector<std::string>& header() const { return header_; }
    // Writes manifest.csv (file,schema), including itself. Returns the listed names.
    std::vector<std::string> finish();
    std::string path(const std::string& name) const;

private:
    std::string dir_;
    std::vector<std::string> header_;
    std::vector<std::pair<std::string, std::string>> files_;
};

inline constexpr const char* kSchemaVersion = "1";

}  // namespace kac
