// Copyright 2026 The Floorsight Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace floorsight {

/// Failure category. The gateway maps these onto HTTP status codes.
enum class Errc {
    invalid_argument, // 400
    syntax,           // 400, malformed JSON
    schema,           // 400, well-formed JSON with the wrong shape
    invariant,        // 400, descriptor invariant violated
    not_found,        // 404
    conflict,         // 409
    unavailable,      // 503
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t byte, const std::string& what) : Error(Errc::syntax, what), byte_(byte) {}

    /// 1-based byte offset into the document where parsing stopped.
    std::size_t byte() const noexcept { return byte_; }

private:
    std::size_t byte_;
};

/// Thrown for schema problems; `where` is a dotted location such as
/// `departments[0].assets[2].position.x`.
class SchemaError : public Error {
public:
    SchemaError(std::string where, const std::string& what)
        : Error(Errc::schema, where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

} // namespace floorsight
