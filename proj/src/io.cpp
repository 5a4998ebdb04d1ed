#include "kac/io.hpp"

#include <filesystem>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace kac {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

ArtifactWriter::ArtifactWriter(std::string directory, std::vector<std::string> header)
    : dir_(std::move(directory)), header_(std::move(header)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("output: cannot create directory " + dir_ + ": " + ec.message());
}

std::string ArtifactWriter::path(const std::string& name) const {
    return (std::filesystem::path(dir_) / name).string();
}

std::ofstream ArtifactWriter::open(const std::string& name, const std::string& schema) {
    std::ofstream os(path(name));
    if (!os) throw std::runtime_error("output: cannot write " + path(name));
    os << "# schema=" << schema << '/' << kSchemaVersion << '\n';
    for (const auto& h : header_) os << "# " << h << '\n';
    os << std::setprecision(17);
    files_.emplace_back(name, schema);
    return os;
}

std::vector<std::string> ArtifactWriter::finish() {
    std::ofstream os(path("manifest.csv"));
    if (!os) throw std::runtime_error("output: cannot write manifest");
    for (const auto& h : header_) os << "# " << h << '\n';
    os << "file,schema\n";
    std::vector<std::string> names;
    for (const auto& [name, schema] : files_) {
        os << name << ',' << schema << '/' << kSchemaVersion << '\n';
        names.push_back(name);
    }
    os << "manifest.csv,manifest/" << kSchemaVersion << '\n';
    names.push_back("manifest.csv");
    return names;
}

}  // namespace kac
