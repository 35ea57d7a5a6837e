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
 * Test-only oracles and fixtures. Everything here must stay independent of
 * the implementation paths it is used to check: the scalar-multiplication
 * oracle is naive repeated addition, the inverse oracle is an int64
 * extended Euclid, the digest-reduction oracle is byte-wise Horner, and the
 * toy17 group is enumerated by brute force over all coordinate pairs.
 */

#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include <authlab/authlab.hpp>

namespace testsupport {

using authlab::BigInt;
using authlab::Bytes;
using authlab::CurveParams;
using authlab::Point;
using authlab::Scalar;

/// Brute-force enumeration of every affine point plus infinity.
inline std::vector<Point> enumerate_curve(const CurveParams& c) {
    std::vector<Point> points;
    points.push_back(Point::at_infinity());
    for (BigInt x = 0; x < c.p; ++x) {
        const BigInt rhs = authlab::mod(x * x * x + c.a * x + c.b, c.p);
        for (BigInt y = 0; y < c.p; ++y)
            if (authlab::mod(y * y, c.p) == rhs)
                points.push_back(Point::affine(x, y));
    }
    return points;
}

/// k-fold repeated point_add; the ground truth for scalar_mul.
inline Point naive_scalar_mul(const CurveParams& c, std::uint64_t k, const Point& p) {
    Point acc = Point::at_infinity();
    for (std::uint64_t i = 0; i < k; ++i)
        acc = authlab::point_add(c, acc, p);
    return acc;
}

/// Extended Euclid on plain machine integers (toy-scale moduli only).
inline std::int64_t egcd_inverse_oracle(std::int64_t a, std::int64_t m) {
    std::int64_t old_r = a % m, r = m, old_s = 1, s = 0;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        std::int64_t t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    return ((old_s % m) + m) % m;
}

/// Byte-wise Horner reduction of a digest mod n; structurally independent
/// of the big-endian-integer-then-mod implementation path.
inline BigInt horner_digest_mod(const authlab::Digest& d, const BigInt& n) {
    BigInt acc = 0;
    for (std::uint8_t b : d.bytes)
        acc = authlab::mod(acc * 256 + b, n);
    return acc;
}

/// RandomSource whose fill() bytes are scripted in advance.
class FixedRandom : public authlab::RandomSource {
public:
    explicit FixedRandom(Bytes script) : script_(script.begin(), script.end()) {}

    void fill(std::span<std::uint8_t> out) override {
        for (auto& b : out) {
            if (script_.empty())
                throw std::runtime_error("FixedRandom script exhausted");
            b = script_.front();
            script_.pop_front();
        }
    }

private:
    std::deque<std::uint8_t> script_;
};

/// RandomSource that hands out pre-chosen scalars. Each fill() request is
/// answered with the big-endian encoding of the next scalar, so
/// random_scalar accepts it on the first draw.
class ScriptedScalars : public authlab::RandomSource {
public:
    explicit ScriptedScalars(std::vector<BigInt> values)
        : values_(values.begin(), values.end()) {}

    void fill(std::span<std::uint8_t> out) override {
        if (values_.empty())
            throw std::runtime_error("ScriptedScalars exhausted");
        const Bytes enc = authlab::int_to_be_bytes(values_.front(), out.size());
        values_.pop_front();
        std::copy(enc.begin(), enc.end(), out.begin());
    }

private:
    std::deque<BigInt> values_;
};

inline std::string random_identifier(std::mt19937_64& gen, std::size_t max_len = 12) {
    static constexpr char alphabet[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789._-";
    std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
    std::uniform_int_distribution<std::size_t> char_dist(0, sizeof(alphabet) - 2);
    std::string s;
    const std::size_t len = len_dist(gen);
    for (std::size_t i = 0; i < len; ++i)
        s.push_back(alphabet[char_dist(gen)]);
    return s;
}

inline authlab::Digest random_digest(std::mt19937_64& gen) {
    authlab::Digest d;
    for (auto& b : d.bytes)
        b = static_cast<std::uint8_t>(gen() & 0xff);
    return d;
}

inline authlab::ServerKey random_server_key(std::mt19937_64& gen) {
    Bytes bytes(32);
    for (auto& b : bytes)
        b = static_cast<std::uint8_t>(gen() & 0xff);
    return authlab::ServerKey(bytes);
}

/// Stream decorator recording full inbound/outbound transcripts.
class RecordingStream : public authlab::Stream {
public:
    explicit RecordingStream(authlab::Stream& inner) : inner_(inner) {}

    std::size_t read_some(std::span<std::uint8_t> out) override {
        const std::size_t got = inner_.read_some(out);
        inbound_.append(reinterpret_cast<const char*>(out.data()), got);
        return got;
    }

    void write_all(std::span<const std::uint8_t> data) override {
        outbound_.append(reinterpret_cast<const char*>(data.data()), data.size());
        inner_.write_all(data);
    }

    void close() override { inner_.close(); }

    const std::string& inbound() const { return inbound_; }
    const std::string& outbound() const { return outbound_; }

    std::size_t outbound_lines() const {
        return static_cast<std::size_t>(
            std::count(outbound_.begin(), outbound_.end(), '\n'));
    }
    std::size_t inbound_lines() const {
        return static_cast<std::size_t>(
            std::count(inbound_.begin(), inbound_.end(), '\n'));
    }

private:
    authlab::Stream& inner_;
    std::string inbound_;
    std::string outbound_;
};

} // namespace testsupport
