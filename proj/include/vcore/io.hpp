#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vcore::io {

/// Reads a plain or gzip-compressed text file line by line. The returned
/// view stays valid until the next call to next().
class LineReader {
public:
    explicit LineReader(const std::filesystem::path& path);
    ~LineReader();
    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;

    bool next(std::string_view& line);
    std::uint64_t line_number() const { return line_number_; }

private:
    bool refill();

    struct Handle;
    std::unique_ptr<Handle> handle_;
    std::filesystem::path path_;
    std::vector<char> buffer_;
    std::size_t begin_ = 0;
    std::size_t end_ = 0;
    bool eof_ = false;
    std::uint64_t line_number_ = 0;
};

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

/// Writes to a sibling temp file then renames over the target.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t seed = 0);
std::uint32_t crc32(std::string_view bytes);
std::string crc32_hex(std::uint32_t crc);

}  // namespace vcore::io
