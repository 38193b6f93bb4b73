// Copyright 2026 The Quench Authors
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

#include <cstdint>
#include <string>
#include <vector>

namespace quench {

// All floating-point values in CSV and summary files are rendered with
// 12 significant digits ("%.12g"), which pins the byte-level determinism
// contract of campaign outputs.
std::string format_g12(double value);

std::string bitstring(std::uint64_t z, int n);  // qubit 0 is the leftmost char
std::uint64_t parse_bitstring(const std::string& s);

// FNV-1a 64-bit content hash, rendered as 16 hex digits
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(const std::string& bytes);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace quench
