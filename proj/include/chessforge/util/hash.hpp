#ifndef CHESSFORGE_UTIL_HASH_HPP
#define CHESSFORGE_UTIL_HASH_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace chessforge {

// FNV-1a over the bytes, used to fingerprint configurations in run
// manifests. Not cryptographic; collisions only cost a misleading manifest.
inline uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

} // namespace chessforge

#endif
