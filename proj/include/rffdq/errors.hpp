// Copyright 2026 The rffdq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace rffdq {

/// Bad user input: wrong dimensions, out-of-range values, invalid labels.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed file contents. The message carries the offending line number.
struct ParseError : InputError {
    using InputError::InputError;
};

/// Invalid experiment or CLI configuration.
struct ConfigError : InputError {
    using InputError::InputError;
};

/// Encoding whose generator spectrum cannot be placed on an integer grid.
struct UnsupportedEncodingError : InputError {
    using InputError::InputError;
};

/// Singular systems, non-PSD matrices beyond tolerance, failed factorizations.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A computation that would exceed the configured memory or time budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rffdq
