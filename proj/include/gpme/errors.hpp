/*
 * Copyright (C) 2026 The gpme-system authors
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

namespace gpme {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (negative density, p >= 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative kernel failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Time step above the positivity limit of the explicit scheme.
class CflError : public Error {
public:
    using Error::Error;
};

/// Problem-spec text that cannot be parsed or fails validation.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line)
    {
    }
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A checked property of a run does not hold.
class InvariantError : public Error {
public:
    using Error::Error;
};

} // namespace gpme
