// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace occsim {

/// Bit sequence; every element is 0 or 1.
using Bits = std::vector<std::uint8_t>;

/// Parses an ASCII string of '0'/'1'. Throws std::invalid_argument otherwise.
Bits bits_from_string(std::string_view text);
std::string bits_to_string(std::span<const std::uint8_t> bits);

/// Bytes to bits, most significant bit first.
Bits text_to_bits(std::string_view text);

/// Inverse of text_to_bits over whole bytes; a trailing partial byte is
/// dropped, as are trailing NUL bytes (frame zero padding).
std::string bits_to_text(std::span<const std::uint8_t> bits);

/// Throws std::invalid_argument if any element is not 0 or 1.
void require_binary(std::span<const std::uint8_t> bits);

}  // namespace occsim
