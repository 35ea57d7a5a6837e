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
 * Short-Weierstrass group arithmetic over F_p: y^2 = x^3 + ax + b.
 *
 * Public operations work on affine points with the chord-tangent law and
 * per-step modular inversion. scalar_mul switches to Jacobian coordinates
 * internally (one final inversion), which is what keeps the dictionary
 * scan usable on 256-bit curves; the toy17 repeated-addition oracle in the
 * test suite pins both paths to the same group.
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include <boost/multiprecision/miller_rabin.hpp>

#include "authlab/bigint.hpp"
#include "authlab/errors.hpp"

namespace authlab {

struct Point {
    bool infinity = true;
    BigInt x = 0;
    BigInt y = 0;

    static Point at_infinity() { return Point{}; }
    static Point affine(BigInt px, BigInt py) {
        return Point{false, std::move(px), std::move(py)};
    }
    bool is_infinity() const { return infinity; }

    friend bool operator==(const Point&, const Point&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Point& p) {
    if (p.infinity) return os << "Infinity";
    return os << "(" << p.x << ", " << p.y << ")";
}

/// Integer mod n. Protocol-facing scalars must additionally be nonzero.
struct Scalar {
    BigInt value = 0;

    friend bool operator==(const Scalar&, const Scalar&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Scalar& s) {
    return os << s.value;
}

struct CurveParams {
    std::string name;
    BigInt p;          // field modulus
    BigInt a;
    BigInt b;
    BigInt gx;
    BigInt gy;
    BigInt n;          // prime order of the base point
    std::size_t coord_width = 0;   // ceil(bitlen(p)/8)

    Point base_point() const { return Point::affine(gx, gy); }

    /// Validates all invariants and fills in coord_width. Throws FormatError
    /// when the parameters do not describe a usable group.
    static CurveParams create(std::string name, BigInt p, BigInt a, BigInt b,
                              BigInt gx, BigInt gy, BigInt n);
};

inline bool validate_point(const CurveParams& c, const Point& pt) {
    if (pt.infinity) return true;
    if (pt.x < 0 || pt.x >= c.p || pt.y < 0 || pt.y >= c.p) return false;
    const BigInt lhs = mod(pt.y * pt.y, c.p);
    const BigInt rhs = mod(pt.x * pt.x * pt.x + c.a * pt.x + c.b, c.p);
    return lhs == rhs;
}

namespace detail {

inline BigInt fadd(const CurveParams& c, const BigInt& u, const BigInt& v) {
    BigInt r = u + v;
    if (r >= c.p) r -= c.p;
    return r;
}

inline BigInt fsub(const CurveParams& c, const BigInt& u, const BigInt& v) {
    BigInt r = u - v;
    if (r < 0) r += c.p;
    return r;
}

inline BigInt fmul(const CurveParams& c, const BigInt& u, const BigInt& v) {
    return (u * v) % c.p;   // operands already in [0, p)
}

inline void require_valid(const CurveParams& c, const Point& pt, const char* what) {
    if (!validate_point(c, pt))
        throw InvalidPoint(std::string(what) + ": point not on curve " + c.name);
}

// Jacobian (X, Y, Z): x = X/Z^2, y = Y/Z^3; Z == 0 encodes infinity.
struct JacPoint {
    BigInt X = 1, Y = 1, Z = 0;
    bool is_infinity() const { return Z == 0; }
};

inline JacPoint to_jacobian(const Point& pt) {
    if (pt.infinity) return JacPoint{};
    return JacPoint{pt.x, pt.y, 1};
}

inline Point from_jacobian(const CurveParams& c, const JacPoint& j) {
    if (j.is_infinity()) return Point::at_infinity();
    const BigInt zi = mod_inverse(j.Z, c.p);
    const BigInt zi2 = fmul(c, zi, zi);
    return Point::affine(fmul(c, j.X, zi2), fmul(c, j.Y, fmul(c, zi2, zi)));
}

inline JacPoint jdbl(const CurveParams& c, const JacPoint& j) {
    if (j.is_infinity() || j.Y == 0) return JacPoint{};
    const BigInt y2 = fmul(c, j.Y, j.Y);
    const BigInt s = fmul(c, fadd(c, fadd(c, j.X, j.X), fadd(c, j.X, j.X)), y2);
    const BigInt z2 = fmul(c, j.Z, j.Z);
    const BigInt x2 = fmul(c, j.X, j.X);
    const BigInt m = fadd(c, fadd(c, fadd(c, x2, x2), x2),
                          fmul(c, c.a, fmul(c, z2, z2)));
    const BigInt xr = fsub(c, fmul(c, m, m), fadd(c, s, s));
    const BigInt y4 = fmul(c, y2, y2);
    const BigInt y4_8 = fadd(c, fadd(c, fadd(c, y4, y4), fadd(c, y4, y4)),
                             fadd(c, fadd(c, y4, y4), fadd(c, y4, y4)));
    const BigInt yr = fsub(c, fmul(c, m, fsub(c, s, xr)), y4_8);
    const BigInt zr = fmul(c, fadd(c, j.Y, j.Y), j.Z);
    return JacPoint{xr, yr, zr};
}

// Mixed addition J + affine Q (Q never infinity here).
inline JacPoint jadd_mixed(const CurveParams& c, const JacPoint& j, const Point& q) {
    if (j.is_infinity()) return to_jacobian(q);
    const BigInt z2 = fmul(c, j.Z, j.Z);
    const BigInt u2 = fmul(c, q.x, z2);
    const BigInt s2 = fmul(c, q.y, fmul(c, z2, j.Z));
    const BigInt h = fsub(c, u2, j.X);
    const BigInt r = fsub(c, s2, j.Y);
    if (h == 0) {
        if (r == 0) return jdbl(c, j);   // same point
        return JacPoint{};               // inverse pair
    }
    const BigInt h2 = fmul(c, h, h);
    const BigInt h3 = fmul(c, h2, h);
    const BigInt uh2 = fmul(c, j.X, h2);
    BigInt xr = fsub(c, fsub(c, fmul(c, r, r), h3), fadd(c, uh2, uh2));
    BigInt yr = fsub(c, fmul(c, r, fsub(c, uh2, xr)), fmul(c, j.Y, h3));
    BigInt zr = fmul(c, h, j.Z);
    return JacPoint{std::move(xr), std::move(yr), std::move(zr)};
}

/// Double-and-add with the raw (unreduced) scalar. Used both by the public
/// scalar_mul after mod-n reduction and by parameter validation, which must
/// check n*G = infinity without the reduction short-circuiting it.
inline Point scalar_mul_raw(const CurveParams& c, const BigInt& k, const Point& pt) {
    if (k == 0 || pt.infinity) return Point::at_infinity();
    JacPoint acc;
    for (std::size_t i = bit_length(k); i-- > 0;) {
        acc = jdbl(c, acc);
        if (boost::multiprecision::bit_test(k, static_cast<unsigned>(i)))
            acc = jadd_mixed(c, acc, pt);
    }
    return from_jacobian(c, acc);
}

} // namespace detail

/// Group sum under the chord-tangent law. Also handles doubling and inverse
/// pairs. Throws InvalidPoint if an operand fails the curve equation.
inline Point point_add(const CurveParams& c, const Point& lhs, const Point& rhs) {
    detail::require_valid(c, lhs, "point_add lhs");
    detail::require_valid(c, rhs, "point_add rhs");
    if (lhs.infinity) return rhs;
    if (rhs.infinity) return lhs;
    if (lhs.x == rhs.x && mod(lhs.y + rhs.y, c.p) == 0)
        return Point::at_infinity();   // P + (-P), including 2-torsion doubling
    BigInt lambda;
    if (lhs.x == rhs.x && lhs.y == rhs.y) {
        const BigInt num = mod(3 * lhs.x * lhs.x + c.a, c.p);
        lambda = detail::fmul(c, num, mod_inverse(mod(2 * lhs.y, c.p), c.p));
    } else {
        const BigInt num = detail::fsub(c, rhs.y, lhs.y);
        lambda = detail::fmul(c, num, mod_inverse(detail::fsub(c, rhs.x, lhs.x), c.p));
    }
    const BigInt x3 = mod(lambda * lambda - lhs.x - rhs.x, c.p);
    const BigInt y3 = mod(lambda * (lhs.x - x3) - lhs.y, c.p);
    return Point::affine(x3, y3);
}

inline Point point_negate(const CurveParams& c, const Point& pt) {
    detail::require_valid(c, pt, "point_negate");
    if (pt.infinity || pt.y == 0) return pt;
    return Point::affine(pt.x, c.p - pt.y);
}

/// k-fold group sum. Accepts any k >= 0 and reduces it mod n first, so that
/// products like HPW*r1 can be passed without a separate reduction step.
inline Point scalar_mul(const CurveParams& c, const BigInt& k, const Point& pt) {
    if (k < 0)
        throw Error("scalar_mul: negative scalar");
    detail::require_valid(c, pt, "scalar_mul");
    return detail::scalar_mul_raw(c, k % c.n, pt);
}

inline Point scalar_mul(const CurveParams& c, const Scalar& k, const Point& pt) {
    return scalar_mul(c, k.value, pt);
}

/// Reduce an arbitrary non-negative integer into a Scalar in [0, n).
inline Scalar scalar_from(const CurveParams& c, const BigInt& v) {
    return Scalar{mod(v, c.n)};
}

inline Scalar mul_scalars(const CurveParams& c, const Scalar& u, const Scalar& v) {
    return Scalar{mod(u.value * v.value, c.n)};
}

/// k^-1 mod n. Throws ScalarDegenerate when k ≡ 0 (mod n).
inline Scalar scalar_inv(const CurveParams& c, const Scalar& k) {
    const BigInt v = mod(k.value, c.n);
    if (v == 0)
        throw ScalarDegenerate("scalar_inv: scalar is 0 mod n");
    return Scalar{mod_inverse(v, c.n)};
}

inline CurveParams CurveParams::create(std::string name, BigInt p, BigInt a, BigInt b,
                                       BigInt gx, BigInt gy, BigInt n) {
    CurveParams c;
    c.name = std::move(name);
    c.p = std::move(p);
    c.a = std::move(a);
    c.b = std::move(b);
    c.gx = std::move(gx);
    c.gy = std::move(gy);
    c.n = std::move(n);
    if (!valid_identifier(c.name))
        throw FormatError("curve name must match [A-Za-z0-9._-]{1,64}");
    if (c.p <= 3)
        throw FormatError("curve " + c.name + ": p must exceed 3");
    // BigInt carries 1024 bits; field products need 2x the modulus width.
    if (c.p < 0 || c.n < 0 || bit_length(c.p) > 512 || bit_length(c.n) > 512)
        throw FormatError("curve " + c.name + ": moduli beyond 512 bits unsupported");

    // miller_rabin_test requires an unbounded integer type; convert the
    // fixed-width values for the primality checks only.
    std::mt19937_64 mr_gen(0x9e3779b97f4a7c15ULL);
    const boost::multiprecision::cpp_int p_check(c.p);
    const boost::multiprecision::cpp_int n_check(c.n);
    if (!boost::multiprecision::miller_rabin_test(p_check, 25, mr_gen))
        throw FormatError("curve " + c.name + ": p is not prime");
    if (c.n <= 1 || !boost::multiprecision::miller_rabin_test(n_check, 25, mr_gen))
        throw FormatError("curve " + c.name + ": n is not prime");

    c.a = mod(c.a, c.p);
    c.b = mod(c.b, c.p);
    const BigInt disc = mod(4 * c.a * c.a * c.a + 27 * c.b * c.b, c.p);
    if (disc == 0)
        throw FormatError("curve " + c.name + ": singular (4a^3 + 27b^2 = 0)");

    c.coord_width = (bit_length(c.p) + 7) / 8;

    const Point g = c.base_point();
    if (!validate_point(c, g) || g.infinity)
        throw FormatError("curve " + c.name + ": base point not on curve");
    if (!detail::scalar_mul_raw(c, c.n, g).is_infinity())
        throw FormatError("curve " + c.name + ": n*G is not the identity");
    return c;
}

/// p = 17, a = b = 2, G = (5,1), n = 19. Every one of the 19 group elements
/// is enumerable, which is what the exhaustive algebra tests rely on.
inline const CurveParams& toy17() {
    static const CurveParams c = CurveParams::create("toy17", 17, 2, 2, 5, 1, 19);
    return c;
}

/// secp256r1 / NIST P-256.
inline const CurveParams& p256() {
    static const CurveParams c = CurveParams::create(
        "p256",
        BigInt("0xffffffff00000001000000000000000000000000ffffffffffffffffffffffff"),
        BigInt("0xffffffff00000001000000000000000000000000fffffffffffffffffffffffc"),
        BigInt("0x5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b"),
        BigInt("0x6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"),
        BigInt("0x4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5"),
        BigInt("0xffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551"));
    return c;
}

inline const CurveParams& find_curve(std::string_view name) {
    if (name == "toy17") return toy17();
    if (name == "p256") return p256();
    throw ConfigError("unknown curve: " + std::string(name));
}

/// Loads `key = hex-or-decimal` lines for p, a, b, Gx, Gy, n (plus an
/// optional name). Blank lines and #-comments are ignored. All CurveParams
/// invariants are re-validated.
inline CurveParams load_curve_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoFailure("cannot open curve file: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view sv(line);
        while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
        if (sv.empty() || sv.front() == '#') continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw FormatError("curve file: missing '=' in line: " + line);
        auto trim = [](std::string_view s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
            return std::string(s);
        };
        const std::string key = trim(sv.substr(0, eq));
        const std::string value = trim(sv.substr(eq + 1));
        if (kv.count(key))
            throw FormatError("curve file: duplicate key " + key);
        kv[key] = value;
    }
    for (const char* required : {"p", "a", "b", "Gx", "Gy", "n"})
        if (!kv.count(required))
            throw FormatError(std::string("curve file: missing key ") + required);
    const std::string name = kv.count("name") ? kv["name"] : path.stem().string();
    return CurveParams::create(name, parse_bigint(kv["p"]), parse_bigint(kv["a"]),
                               parse_bigint(kv["b"]), parse_bigint(kv["Gx"]),
                               parse_bigint(kv["Gy"]), parse_bigint(kv["n"]));
}

} // namespace authlab
