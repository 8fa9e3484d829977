#include "fakenews/hash.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <memory>

#include "fakenews/common.hpp"

namespace fakenews {

Sha256Digest sha256(std::span<const std::uint8_t> bytes) {
  Sha256Digest digest{};
  unsigned int length = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1 || length != digest.size()) {
    throw Error("sha256 failed");
  }
  return digest;
}

Sha256Digest sha256(std::string_view text) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::string sha256_hex(std::string_view text) { return to_hex(sha256(text)); }

Sha256Digest digest_from_hex(std::string_view hex) {
  if (hex.size() != 64) {
    throw InputError("expected 64 hex characters, got " + std::to_string(hex.size()));
  }
  Sha256Digest digest{};
  for (std::size_t i = 0; i < digest.size(); ++i) {
    const auto* first = hex.data() + 2 * i;
    const auto result = std::from_chars(first, first + 2, digest[i], 16);
    if (result.ec != std::errc() || result.ptr != first + 2) {
      throw InputError("invalid hex digest '" + std::string(hex) + "'");
    }
  }
  return digest;
}

std::string hexfloat(double value) {
  char buf[64];
  const bool negative = std::signbit(value);
  const auto result = std::to_chars(buf, buf + sizeof(buf), std::fabs(value), std::chars_format::hex);
  std::string out = negative ? "-0x" : "0x";
  out.append(buf, result.ptr);
  return out;
}

double parse_hexfloat(std::string_view text) {
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) {
    throw InputError("expected hex float, got '" + std::string(text) + "'");
  }
  text.remove_prefix(2);
  double value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::hex);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw InputError("malformed hex float '" + std::string(text) + "'");
  }
  return negative ? -value : value;
}

}  // namespace fakenews
