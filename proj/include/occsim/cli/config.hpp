// SPDX-License-Identifier: Apache-2.0
//
// Flat `key = value` configuration files. Blank lines and lines starting
// with '#' are ignored; keys are unique.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "occsim/optics_render.hpp"

namespace occsim::cli {

/// Missing, unknown or malformed configuration keys.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

/// Throws ParseError (with line) for lines without '=' or repeated keys.
KeyValues parse_key_values(std::istream& in, const std::string& source);
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const KeyValues& values, std::ostream& out);

/// Scene keys in file order.
const std::vector<std::string>& scene_keys();

/// Values reproducing SceneConfig{}; numbers are shortest round-trip text.
KeyValues default_scene_values();

/// Commented scene file listing every key with its default.
std::string default_scene_text();

/// Builds a scene from exactly the scene keys. Throws ConfigError naming the
/// first missing or unknown key, or a key whose value is not a number.
SceneConfig scene_from_values(const KeyValues& values);

double number_value(const KeyValues& values, const std::string& key);
std::uint64_t seed_value(const KeyValues& values, const std::string& key);

}  // namespace occsim::cli
