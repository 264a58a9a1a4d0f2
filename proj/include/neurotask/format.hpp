// Copyright 2026 The neurotask Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Text output helpers shared by every exporter: locale-independent number
// formatting, CSV escaping, file writing, content digests and the JSON
// provenance sidecar that accompanies every output file.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace neurotask {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Locale-independent parse of a complete token. Throws ParseError.
double parse_double(std::string_view token);

std::string csv_escape(std::string_view field);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

/// 64-bit FNV-1a over the bytes, rendered as "fnv1a64:<16 hex digits>".
std::string digest_bytes(std::string_view bytes);
std::string digest_file(const std::filesystem::path& path);

std::string_view tool_version() noexcept;

struct SidecarInput {
  std::string path;
  std::string digest;
};

/// Writes `<output>.meta.json` recording the producing command, its
/// configuration and the digests of the inputs. Contains no timestamps, so
/// reruns on identical inputs produce identical bytes.
void write_sidecar(const std::filesystem::path& output, std::string_view command,
                   const nlohmann::ordered_json& config, const std::vector<SidecarInput>& inputs,
                   const nlohmann::ordered_json& notes = nlohmann::ordered_json::object());

}  // namespace neurotask
