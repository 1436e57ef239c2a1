#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace xmethod {

std::string read_file(const std::filesystem::path& path);  // throws Error(io_failure)

/// Writes through a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

}  // namespace xmethod
