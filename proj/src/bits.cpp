// SPDX-License-Identifier: Apache-2.0
#include "occsim/bits.hpp"

#include <stdexcept>

namespace occsim {

Bits bits_from_string(std::string_view text) {
    Bits bits;
    bits.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '0' && c != '1') {
            throw std::invalid_argument("bit string contains '" + std::string(1, c) + "' at offset " +
                                        std::to_string(i));
        }
        bits.push_back(c == '1' ? 1 : 0);
    }
    return bits;
}

std::string bits_to_string(std::span<const std::uint8_t> bits) {
    std::string out;
    out.reserve(bits.size());
    for (std::uint8_t b : bits) out.push_back(b ? '1' : '0');
    return out;
}

Bits text_to_bits(std::string_view text) {
    Bits bits;
    bits.reserve(text.size() * 8);
    for (unsigned char c : text) {
        for (int k = 7; k >= 0; --k) bits.push_back((c >> k) & 1u);
    }
    return bits;
}

std::string bits_to_text(std::span<const std::uint8_t> bits) {
    std::string out;
    for (std::size_t i = 0; i + 8 <= bits.size(); i += 8) {
        unsigned char c = 0;
        for (std::size_t k = 0; k < 8; ++k) c = static_cast<unsigned char>((c << 1) | (bits[i + k] & 1u));
        out.push_back(static_cast<char>(c));
    }
    while (!out.empty() && out.back() == '\0') out.pop_back();
    return out;
}

void require_binary(std::span<const std::uint8_t> bits) {
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] > 1) {
            throw std::invalid_argument("bit " + std::to_string(i) + " is not 0 or 1");
        }
    }
}

}  // namespace occsim
