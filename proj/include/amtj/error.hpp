/*
 * Copyright 2026 The amtj Authors
 * SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include <stdexcept>
#include <string>

namespace amtj {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// A PCSA was asked to race two branches holding the same MTJ state.
class DegenerateRace : public InvalidArgument {
  public:
    using InvalidArgument::InvalidArgument;
};

/// A write-once MTJ look-up table was programmed twice.
class WriteOnceViolation : public Error {
  public:
    using Error::Error;
};

} // namespace amtj
