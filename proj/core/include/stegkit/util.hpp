/*
 * Copyright 2026 The stegkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stegkit {

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

/// Writes via a temporary file in the same directory and renames on success,
/// so a failing writer never leaves a partial output behind.
void write_file_atomic(const std::string& path,
                       std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::string& path, const std::string& text);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);

std::array<std::uint8_t, 32> sha256_bytes(std::span<const std::uint8_t> bytes);
std::array<std::uint8_t, 32> sha256_str(const std::string& s);

/// Shortest round-trip decimal form; infinities serialize as "inf"/"-inf".
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace stegkit
