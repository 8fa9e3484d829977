#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fakenews {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> bytes);
Sha256Digest sha256(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

/// Parses 64 hex characters; throws InputError otherwise.
Sha256Digest digest_from_hex(std::string_view hex);

/// Exact text encoding of a double as a C99 hex float ("0x1.8p+1").
std::string hexfloat(double value);
double parse_hexfloat(std::string_view text);

}  // namespace fakenews
