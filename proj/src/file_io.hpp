#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace geograph::detail {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);

// Temp file in the same directory, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

}  // namespace geograph::detail
