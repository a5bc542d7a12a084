#pragma once

// Executes a RunConfig: writes the CSV outputs and manifest.json into one
// directory. CSV bodies depend only on the config, never on timing or the
// worker count.

#include <filesystem>
#include <string>
#include <vector>

#include "cavity_ising/config.hpp"

namespace cavity_ising {

inline constexpr const char* kDefaultOutputDirectory = "cavity-ising-out";

struct ExecuteOptions {
  std::filesystem::path out_dir;
  unsigned jobs = 1;
};

struct ExecuteResult {
  std::vector<std::filesystem::path> files;  // CSVs, then the manifest
};

/// --out, then $CAVITY_ISING_OUT, then [output] directory, then the default.
std::filesystem::path resolve_output_directory(const RunConfig& config, const std::string& cli_out);

ExecuteResult execute(const RunConfig& config, const ExecuteOptions& options);

std::string version();

/// printf("%.12g") with a canonical "nan".
std::string format_number(double value);

}  // namespace cavity_ising
