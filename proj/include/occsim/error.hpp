// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace occsim {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Payload does not fit into a single fixed-capacity frame.
class CapacityError : public std::length_error {
public:
    CapacityError(const std::string& what, std::size_t required_bits, std::size_t capacity_bits)
        : std::length_error(what), required_bits_(required_bits), capacity_bits_(capacity_bits) {}

    std::size_t required_bits() const noexcept { return required_bits_; }
    std::size_t capacity_bits() const noexcept { return capacity_bits_; }

private:
    std::size_t required_bits_;
    std::size_t capacity_bits_;
};

/// Malformed text input (CSV, PGM, config). `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
        : std::runtime_error(format(source, line, message)), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& source, std::size_t line, const std::string& message) {
        std::string out = source;
        if (line > 0) {
            out += ":" + std::to_string(line);
        }
        return out + ": " + message;
    }

    std::size_t line_;
};

/// Input whose header or shape matches none of the known schemas.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace occsim
