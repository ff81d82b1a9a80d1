#ifndef NOMAD_SHA256_HPP
#define NOMAD_SHA256_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace nomad {

// FIPS 180-2 SHA-256. Self-contained so the digest pipeline has no
// dependency on system crypto libraries; validated against the standard
// test vectors in tests/sha256_test.cpp.
class Sha256 {
public:
    static constexpr std::size_t kDigestSize = 32;
    using Digest = std::array<std::uint8_t, kDigestSize>;

    Sha256();

    void update(const void* data, std::size_t len);
    void update(std::string_view text) { update(text.data(), text.size()); }

    // Finalizes and returns the digest; the instance must not be reused.
    Digest finish();

    static Digest digest(const void* data, std::size_t len);
    static Digest digest(std::string_view text) { return digest(text.data(), text.size()); }

private:
    void compress(const std::uint8_t block[64]);

    std::array<std::uint32_t, 8> state_;
    std::uint64_t total_len_ = 0;
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffer_len_ = 0;
};

std::string to_hex(const std::uint8_t* data, std::size_t len);
std::string to_hex(const Sha256::Digest& digest);

// Lowercase hex SHA-256 of a text string.
std::string sha256_hex(std::string_view text);

} // namespace nomad

#endif
