#pragma once

#include <string>

namespace modernize {

/// Digest algorithm identifier recorded in artifacts for reproducibility.
inline constexpr const char* kDigestAlgorithm = "sha-256";

/// SHA-256 of the input bytes, lowercase hex.
std::string sha256_hex(const std::string& bytes);

} // namespace modernize
