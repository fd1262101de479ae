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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stegkit {

/// Base class for all stegkit errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Tensor/image shape mismatch; the message names both shapes.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Payload does not fit the carrier.
class CapacityExceeded : public Error {
public:
  CapacityExceeded(std::size_t needed_bits, std::size_t available_bits)
      : Error("payload needs " + std::to_string(needed_bits) +
              " bits but capacity is " + std::to_string(available_bits) +
              " bits"),
        needed(needed_bits),
        available(available_bits) {}

  std::size_t needed;
  std::size_t available;
};

/// A length header that cannot be satisfied by the carrier.
class MalformedHeader : public Error {
public:
  using Error::Error;
};

/// Unsupported file contents (bit depth, interlacing, color type, magic...).
class UnsupportedFormat : public Error {
public:
  using Error::Error;
};

/// Bad configuration value or key.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Filesystem / IO failure.
class IoError : public Error {
public:
  using Error::Error;
};

/// Training aborted (non-finite loss, bad checkpoint, ...).
class TrainError : public Error {
public:
  using Error::Error;
};

}  // namespace stegkit
