#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace potluck {

// Shortest decimal string that round-trips to the same double.
std::string format_real(double x);

// Writes `contents` to `path` via a temporary sibling file and a rename, so a
// reader never observes a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace potluck
