#include "nonstat/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace nonstat {

std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void CsvWriter::header(std::span<const std::string> names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) buffer += ',';
        buffer += names[i];
    }
    buffer += '\n';
}

void CsvWriter::row(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buffer += ',';
        buffer += format_double(values[i]);
    }
    buffer += '\n';
}

void CsvWriter::raw_row(const std::string& line) {
    buffer += line;
    buffer += '\n';
}

std::string encode_matrix(std::span<const double> values, std::uint32_t rows,
                          std::uint32_t cols) {
    if (values.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("encode_matrix: shape mismatch");
    std::string out;
    out.reserve(16 + values.size() * 8);
    out.append("NSC1", 4);
    const std::uint32_t version = 1;
    auto put_u32 = [&](std::uint32_t v) {
        for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
    };
    put_u32(version);
    put_u32(rows);
    put_u32(cols);
    for (double v : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
    return out;
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(std::span<const unsigned char>(
        reinterpret_cast<const unsigned char*>(s.data()), s.size()));
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string("fnv1a64:") + buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    std::filesystem::rename(tmp, path);
}

ArtifactSink::ArtifactSink(std::filesystem::path out_dir, std::string config_echo_json)
    : out_dir_(std::move(out_dir)), config_echo_(std::move(config_echo_json)) {
    std::filesystem::create_directories(out_dir_);
}

void ArtifactSink::add(const std::string& name, const std::string& content) {
    write_file_atomic(out_dir_ / name, content);
    entries_.push_back({name, content.size(), hash_hex(fnv1a64(content))});
}

std::filesystem::path ArtifactSink::finalize(const std::string& results_json) {
    nlohmann::json manifest;
    manifest["version"] = "nonstat 0.1.0";
    manifest["config"] = nlohmann::json::parse(config_echo_);
    manifest["results"] = nlohmann::json::parse(results_json);
    auto& outputs = manifest["outputs"] = nlohmann::json::array();
    for (const auto& e : entries_)
        outputs.push_back({{"path", e.name}, {"bytes", e.bytes}, {"fnv1a64", e.hash}});
    const auto path = out_dir_ / "manifest.json";
    write_file_atomic(path, manifest.dump(2) + "\n");
    return path;
}

std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + manifest_path.string());
    const nlohmann::json manifest = nlohmann::json::parse(in);
    std::vector<std::string> failures;
    const auto dir = manifest_path.parent_path();
    for (const auto& entry : manifest.at("outputs")) {
        const std::string name = entry.at("path").get<std::string>();
        std::ifstream f(dir / name, std::ios::binary);
        if (!f) {
            failures.push_back(name);
            continue;
        }
        std::string content((std::istreambuf_iterator<char>(f)),
                            std::istreambuf_iterator<char>());
        if (hash_hex(fnv1a64(content)) != entry.at("fnv1a64").get<std::string>())
            failures.push_back(name);
    }
    return failures;
}

}  // namespace nonstat
