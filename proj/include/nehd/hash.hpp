#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nehd {

/// SHA-256 of a byte buffer, lowercase hex.
std::string sha256_hex(const std::uint8_t* data, std::size_t len);
std::string sha256_hex(const std::string& s);

/// Content hash of a file, git-blob style: sha256 over "blob <len>\0<bytes>".
std::string content_hash_file(const std::filesystem::path& path);

}  // namespace nehd
