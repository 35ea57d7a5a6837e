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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "authlab/bytes.hpp"
#include "authlab/errors.hpp"

namespace authlab {

// Fixed 1024-bit capacity, stack allocated. Field elements stay under 2^256;
// products need 512 bits and extended-Euclid intermediates stay well inside
// the headroom.
using BigInt = boost::multiprecision::int1024_t;

inline BigInt mod(const BigInt& v, const BigInt& m) {
    BigInt r = v % m;
    if (r < 0) r += m;
    return r;
}

inline std::size_t bit_length(const BigInt& v) {
    if (v == 0) return 0;
    return boost::multiprecision::msb(v) + 1;
}

/// Modular inverse via the extended Euclidean algorithm.
/// Precondition: m > 1 and gcd(a, m) == 1 (all moduli here are prime).
inline BigInt mod_inverse(const BigInt& a, const BigInt& m) {
    BigInt old_r = mod(a, m), r = m;
    BigInt old_s = 1, s = 0;
    while (r != 0) {
        const BigInt q = old_r / r;
        BigInt t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1)
        throw Error("mod_inverse: operand not invertible");
    return mod(old_s, m);
}

/// Parse `0x`-prefixed hex or plain decimal. Used by the curve-file loader.
inline BigInt parse_bigint(std::string_view text) {
    if (text.empty())
        throw FormatError("empty integer literal");
    try {
        return BigInt(std::string(text));
    } catch (const std::exception&) {
        throw FormatError("bad integer literal: " + std::string(text));
    }
}

/// Big-endian, fixed-width encoding. Precondition: 0 <= v < 2^(8*width).
inline Bytes int_to_be_bytes(const BigInt& v, std::size_t width) {
    if (v < 0)
        throw Error("int_to_be_bytes: negative value");
    Bytes out(width, 0);
    BigInt t = v;
    for (std::size_t i = 0; i < width; ++i) {
        out[width - 1 - i] = static_cast<std::uint8_t>(t & 0xff);
        t >>= 8;
    }
    if (t != 0)
        throw Error("int_to_be_bytes: value does not fit in width");
    return out;
}

inline BigInt be_bytes_to_int(std::span<const std::uint8_t> bytes) {
    BigInt v = 0;
    for (std::uint8_t b : bytes) {
        v <<= 8;
        v += b;
    }
    return v;
}

} // namespace authlab
