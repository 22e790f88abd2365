#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace concede {

/// 64-bit FNV-1a. Used for content digests and version tags, not for security.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

std::string digest_hex(std::string_view data);
std::string file_digest(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace concede
