#pragma once

#include <string>
#include <string_view>

namespace deid {

// SHA-256 of a byte string, hex-encoded. Used for artifact digests in run
// manifests.
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::string& path);

}  // namespace deid
