#pragma once

#include <string>
#include <string_view>

namespace clickcast {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// First 16 hex chars of the SHA-256 digest; used for ids and fingerprints.
std::string short_hash(std::string_view data);

}  // namespace clickcast
