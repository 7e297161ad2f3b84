#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace gauss {

/// Shortest round-trip decimal rendering of a double ('.' separator,
/// locale-free); used for every CSV cell so outputs are byte-reproducible.
std::string format_double(double v);

/// Write content to path via a temp file + rename, so files are either fully
/// written or absent.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

std::string hex_u64(std::uint64_t v);

}  // namespace gauss
