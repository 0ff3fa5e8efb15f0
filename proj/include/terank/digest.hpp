#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace terank {

/// 64-bit FNV-1a. Used for input digests in run manifests and for pinning
/// bundled data files; not a cryptographic hash.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

std::string hex64(std::uint64_t value);

}  // namespace terank
