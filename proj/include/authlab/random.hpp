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

#include <cstdint>
#include <random>
#include <span>

#include "authlab/bigint.hpp"
#include "authlab/ecc.hpp"

namespace authlab {

/// Caller-supplied randomness so tests can inject deterministic sources.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;
};

class SystemRandom : public RandomSource {
public:
    void fill(std::span<std::uint8_t> out) override {
        for (auto& b : out)
            b = static_cast<std::uint8_t>(dev_() & 0xff);
    }

private:
    std::random_device dev_;
};

/// Deterministic source for tests, benchmarks and seeded CLI runs.
class SeededRandom : public RandomSource {
public:
    explicit SeededRandom(std::uint64_t seed) : eng_(seed) {}

    void fill(std::span<std::uint8_t> out) override {
        for (auto& b : out)
            b = static_cast<std::uint8_t>(eng_() & 0xff);
    }

private:
    std::mt19937_64 eng_;
};

/// Uniform scalar in [1, n-1] by rejection sampling: draw bitlen(n) bits,
/// retry until the value lands in Z_n^*.
inline Scalar random_scalar(const CurveParams& c, RandomSource& rng) {
    const std::size_t bits = bit_length(c.n);
    const std::size_t width = (bits + 7) / 8;
    const unsigned top_mask =
        bits % 8 == 0 ? 0xff : ((1u << (bits % 8)) - 1);
    Bytes buf(width);
    for (;;) {
        rng.fill(buf);
        buf[0] = static_cast<std::uint8_t>(buf[0] & top_mask);
        const BigInt v = be_bytes_to_int(buf);
        if (v >= 1 && v < c.n)
            return Scalar{v};
    }
}

} // namespace authlab
