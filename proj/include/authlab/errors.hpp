/*
 * Copyright (C) 2026 The authlab developers
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

namespace authlab {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point operand is off-curve, out of range, or infinity where forbidden.
class InvalidPoint : public Error {
public:
    using Error::Error;
};

/// A scalar is congruent to 0 mod n where membership in Z_n^* is required.
class ScalarDegenerate : public Error {
public:
    using Error::Error;
};

/// Wire or byte-level decoding failure: bad tag, arity, hex, charset, length.
class MalformedEncoding : public Error {
public:
    using Error::Error;
};

class BadUsername : public Error {
public:
    using Error::Error;
};

class BadPassword : public Error {
public:
    using Error::Error;
};

class UnknownUser : public Error {
public:
    using Error::Error;
};

class DuplicateUser : public Error {
public:
    using Error::Error;
};

/// Verifier-store or curve-parameter file violates its format.
class FormatError : public Error {
public:
    using Error::Error;
};

class IoFailure : public Error {
public:
    using Error::Error;
};

/// Client-side rejection of the server's challenge (h1 mismatch).
class ServerAuthFailed : public Error {
public:
    using Error::Error;
};

/// Server-side rejection of the client's response (h2 mismatch).
class UserAuthFailed : public Error {
public:
    using Error::Error;
};

/// RESPONSE echoes a username/realm pair that does not match the session.
class SessionMismatch : public Error {
public:
    using Error::Error;
};

/// Bad runtime configuration (flag values, key sizes, curve mismatches).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Socket or in-memory stream failure.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Read deadline expired while waiting for a peer message.
class TimeoutError : public TransportError {
public:
    using TransportError::TransportError;
};

} // namespace authlab
