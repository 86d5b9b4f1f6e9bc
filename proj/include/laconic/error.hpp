// Copyright 2026 The Laconic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance
// with the License. You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace laconic {

// Caller broke a documented precondition or type invariant.
class ContractViolation : public std::invalid_argument {
 public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input data. `line` is 1-based when the source is line-oriented, 0 otherwise.
class ParseError : public std::runtime_error {
 public:
    explicit ParseError(const std::string& msg, std::size_t line = 0) : std::runtime_error(msg), line_(line) {
    }

    std::size_t
    line() const noexcept {
        return line_;
    }

 private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

}  // namespace laconic
