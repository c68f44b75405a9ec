#pragma once

#include <string>
#include <string_view>

namespace stanceval {

// SHA-256 digest as a lowercase hex string. Used to stamp artifacts with the
// config hash and to fingerprint report files in the manifest.
std::string sha256_hex(std::string_view data);

}  // namespace stanceval
