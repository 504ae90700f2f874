#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace sdrc {

/// Write to `path.tmp` then rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal form of a double.
[[nodiscard]] std::string format_double(double v);

/// 64-bit FNV-1a, rendered as 16 hex digits.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view data) noexcept;
[[nodiscard]] std::string hex64(std::uint64_t v);

}  // namespace sdrc
