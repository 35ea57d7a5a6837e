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

/*
 * Byte-level conventions: h(.) = SHA-256, ∥ = raw separator-free
 * concatenation, ⊕ = bytewise XOR, plus the SEC1-style uncompressed point
 * encoding and the digest-to-scalar bridge.
 *
 * Concatenation is deliberately ambiguous at the byte level
 * (("us","erpw") == ("user","pw")); the identifier charset enforced on the
 * wire is what rules the ambiguity out in practice.
 */

#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>

#include <openssl/evp.h>

#include "authlab/bigint.hpp"
#include "authlab/bytes.hpp"
#include "authlab/ecc.hpp"
#include "authlab/errors.hpp"

namespace authlab {

inline constexpr std::size_t kDigestSize = 32;

struct Digest {
    std::array<std::uint8_t, kDigestSize> bytes{};

    friend bool operator==(const Digest&, const Digest&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Digest& d) {
    return os << to_hex(d.bytes);
}

inline Digest sha256(std::span<const std::uint8_t> data) {
    Digest d;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), d.bytes.data(), &len,
                   EVP_sha256(), nullptr) != 1 || len != kDigestSize)
        throw Error("SHA-256 computation failed");
    return d;
}

namespace detail {

inline void append_part(Bytes& out, std::string_view s) {
    out.insert(out.end(), s.begin(), s.end());
}
inline void append_part(Bytes& out, const char* s) {
    append_part(out, std::string_view(s));
}
inline void append_part(Bytes& out, std::span<const std::uint8_t> b) {
    out.insert(out.end(), b.begin(), b.end());
}
inline void append_part(Bytes& out, const Bytes& b) {
    out.insert(out.end(), b.begin(), b.end());
}
inline void append_part(Bytes& out, const Digest& d) {
    out.insert(out.end(), d.bytes.begin(), d.bytes.end());
}

} // namespace detail

/// ∥: byte-level concatenation, no separators, no length prefixes. Strings
/// contribute UTF-8 bytes, digests their raw 32 bytes; points must be passed
/// through encode_point first (their width depends on the curve).
template <typename... Parts>
Bytes concat(const Parts&... parts) {
    Bytes out;
    (detail::append_part(out, parts), ...);
    return out;
}

/// h(a ∥ b ∥ ...): the protocol hash applied to a concatenation.
template <typename... Parts>
Digest hash_concat(const Parts&... parts) {
    return sha256(concat(parts...));
}

inline Digest xor_digests(const Digest& a, const Digest& b) {
    Digest out;
    for (std::size_t i = 0; i < kDigestSize; ++i)
        out.bytes[i] = a.bytes[i] ^ b.bytes[i];
    return out;
}

/// Bridge between the digest world and the scalar world: the scheme uses HPW
/// both as XOR-able bytes and as an invertible scalar mod n. Both sides must
/// apply this identical reduction. Throws ScalarDegenerate when the digest
/// reduces to 0 mod n, which makes the associated password unusable.
inline Scalar digest_to_scalar(const Digest& d, const CurveParams& c) {
    const BigInt v = mod(be_bytes_to_int(d.bytes), c.n);
    if (v == 0)
        throw ScalarDegenerate("digest reduces to 0 mod n");
    return Scalar{v};
}

/// Infinity -> 0x00; Affine(x,y) -> 0x04 ∥ x-BE ∥ y-BE at coord_width each.
inline Bytes encode_point(const CurveParams& c, const Point& pt) {
    if (pt.infinity) return Bytes{0x00};
    Bytes out;
    out.reserve(1 + 2 * c.coord_width);
    out.push_back(0x04);
    detail::append_part(out, int_to_be_bytes(pt.x, c.coord_width));
    detail::append_part(out, int_to_be_bytes(pt.y, c.coord_width));
    return out;
}

/// Inverse of encode_point; re-validates the curve equation.
inline Point decode_point(const CurveParams& c, std::span<const std::uint8_t> bytes) {
    if (bytes.size() == 1) {
        if (bytes[0] != 0x00)
            throw MalformedEncoding("bad point tag for 1-byte encoding");
        return Point::at_infinity();
    }
    if (bytes.size() != 1 + 2 * c.coord_width)
        throw MalformedEncoding("bad point encoding length");
    if (bytes[0] != 0x04)
        throw MalformedEncoding("bad point tag");
    const Point pt = Point::affine(
        be_bytes_to_int(bytes.subspan(1, c.coord_width)),
        be_bytes_to_int(bytes.subspan(1 + c.coord_width, c.coord_width)));
    if (!validate_point(c, pt))
        throw InvalidPoint("decoded coordinates are not on curve " + c.name);
    return pt;
}

} // namespace authlab
