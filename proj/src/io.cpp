#include "gauss/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "gauss/errors.hpp"

namespace gauss {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw DataError("write failure on " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string hex_u64(std::uint64_t v) {
    char buf[19] = "0x";
    static const char* digits = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) {
        buf[2 + i] = digits[(v >> (60 - 4 * i)) & 0xf];
    }
    buf[18] = '\0';
    return std::string(buf);
}

}  // namespace gauss
