/**
 * Copyright 2026 swpsim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SWP_CONFIG_HPP
#define SWP_CONFIG_HPP

#include <stdexcept>
#include <string>

#include "swp/protocols.hpp"

namespace swp {

inline constexpr const char* kToolVersion = "0.1.0";

/// Config diagnostics carry the dotted key path and, for the text format,
/// the line number.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, int line, const std::string& message);
  const std::string& key_path() const { return path_; }
  int line() const { return line_; }  // 0 when unknown (JSON input)

 private:
  std::string path_;
  int line_;
};

/// Parses the experiment config. The text format is INI-style sections of
/// key = value lines; input starting with '{' is parsed as the equivalent
/// JSON encoding. Unknown keys and out-of-range values raise ConfigError
/// with the offending key path.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name = "<config>");
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical text serialization; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

struct RunManifest {
  std::string config_path;  // "<flags>" when assembled from CLI flags only
  ExperimentConfig config;
  std::string out_dir = "out";
  bool emit_curves = false;
  std::string tool_version = kToolVersion;
};

/// Executes the configured protocol and writes the report JSON, E-table
/// CSVs, Monte Carlo trial logs, and requested curve files into out_dir.
/// Every output embeds the manifest; re-running a manifest reproduces the
/// outputs byte for byte. Returns the process exit status.
int run_manifest(const RunManifest& manifest);

}  // namespace swp

#endif  // SWP_CONFIG_HPP
