// SPDX-License-Identifier: Apache-2.0
//
// The `occsim` command line. Every subcommand resolves its arguments into a
// RunSpec, executes it, and writes its artifacts followed by a manifest
// `<first artifact>.manifest` from which `occsim replay` reproduces them.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "occsim/cli/config.hpp"

namespace occsim::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,     ///< usage, configuration or I/O error
    kExitCapacity = 2,    ///< payload does not fit one frame
    kExitLinkBroken = 3,  ///< capture could not resolve the frame
    kExitNoFrame = 4,     ///< decoder found no frame in the image
    kExitBadInput = 5,    ///< malformed or unrecognised input file
};

struct RunSpec {
    std::string command;
    KeyValues params;  ///< command arguments as canonical text
    KeyValues scene;   ///< resolved scene keys; empty when unused
    std::uint64_t seed = 1;
};

/// Executes a resolved run. Returns an ExitCode; artifacts and the manifest
/// are written only on success.
int execute(const RunSpec& run, std::ostream& out, std::ostream& err);

void write_manifest(const RunSpec& run, const std::vector<std::filesystem::path>& outputs, std::ostream& out);
RunSpec read_manifest(const std::filesystem::path& path);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace occsim::cli
