#ifndef HERDLENS_IO_HPP
#define HERDLENS_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace herdlens {

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place, so readers
/// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal form that parses back to the same double.
std::string format_real(double value);

/// Fixed-point form with the given number of decimals.
std::string format_fixed(double value, int decimals);

} // namespace herdlens

#endif
