#include "vcore/io.hpp"

#include "vcore/errors.hpp"

#include <zlib.h>

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vcore::io {

struct LineReader::Handle {
    gzFile file = nullptr;
    ~Handle() {
        if (file) gzclose(file);
    }
};

namespace {
constexpr std::size_t kChunk = 1 << 20;
}

LineReader::LineReader(const std::filesystem::path& path)
    : handle_(std::make_unique<Handle>()), path_(path), buffer_(kChunk) {
    handle_->file = gzopen(path.c_str(), "rb");
    if (!handle_->file) throw IoError("cannot open " + path.string());
    gzbuffer(handle_->file, 256 * 1024);
}

LineReader::~LineReader() = default;

bool LineReader::refill() {
    if (eof_) return false;
    // keep the unconsumed tail at the front
    const std::size_t tail = end_ - begin_;
    if (begin_ > 0 && tail > 0) std::memmove(buffer_.data(), buffer_.data() + begin_, tail);
    begin_ = 0;
    end_ = tail;
    if (end_ == buffer_.size()) buffer_.resize(buffer_.size() * 2);
    const auto want = static_cast<unsigned>(buffer_.size() - end_);
    const int got = gzread(handle_->file, buffer_.data() + end_, want);
    if (got < 0) {
        int errnum = 0;
        const char* msg = gzerror(handle_->file, &errnum);
        throw IoError(path_.string() + ": read error: " + (msg ? msg : "unknown"));
    }
    if (got == 0) {
        eof_ = true;
        return false;
    }
    end_ += static_cast<std::size_t>(got);
    return true;
}

bool LineReader::next(std::string_view& line) {
    for (;;) {
        const char* start = buffer_.data() + begin_;
        const auto* nl = static_cast<const char*>(std::memchr(start, '\n', end_ - begin_));
        if (nl) {
            std::size_t len = static_cast<std::size_t>(nl - start);
            begin_ += len + 1;
            if (len > 0 && start[len - 1] == '\r') --len;
            line = std::string_view(start, len);
            ++line_number_;
            return true;
        }
        if (!refill()) {
            if (begin_ == end_) return false;
            // final line without newline
            const char* s = buffer_.data() + begin_;
            std::size_t len = end_ - begin_;
            begin_ = end_;
            if (len > 0 && s[len - 1] == '\r') --len;
            line = std::string_view(s, len);
            ++line_number_;
            return true;
        }
    }
}

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<std::uint8_t> bytes(size);
    if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
        throw IoError("cannot read " + path.string());
    }
    return bytes;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw IoError("cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t seed) {
    uLong crc = seed;
    const std::uint8_t* p = bytes.data();
    std::size_t left = bytes.size();
    while (left > 0) {
        const auto n = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
        crc = ::crc32(crc, p, n);
        p += n;
        left -= n;
    }
    return static_cast<std::uint32_t>(crc);
}

std::uint32_t crc32(std::string_view bytes) {
    return crc32(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::string crc32_hex(std::uint32_t crc) {
    std::array<char, 9> buf{};
    std::snprintf(buf.data(), buf.size(), "%08x", crc);
    return std::string(buf.data(), 8);
}

}  // namespace vcore::io
