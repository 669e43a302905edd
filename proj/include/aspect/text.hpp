#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aspect::text {

/// Strips leading and trailing ASCII whitespace.
std::string trim(std::string_view s);

/// Splits on every occurrence of `delim`; empty fields are kept.
std::vector<std::string> split(std::string_view s, std::string_view delim);

std::string join(const std::vector<std::string>& parts, std::string_view delim);

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = kFnvOffsetBasis) noexcept;

/// Lowercases with root-locale rules and then applies NFC. Invalid UTF-8
/// sequences become U+FFFD.
std::string fold_nfc(std::string_view utf8);

/// Splits a UTF-8 string into its code points, each as its own UTF-8 string.
std::vector<std::string> code_points(std::string_view utf8);

}  // namespace aspect::text
