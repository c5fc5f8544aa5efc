#pragma once

#include <string>

namespace didots {

// Hex digest of the SHA-256 of `data`. Used for artifact manifests.
std::string sha256_hex(const std::string& data);

// Digest of a file's bytes. Throws Error(IO_ERROR) if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace didots
