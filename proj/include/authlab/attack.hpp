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
 * Offline password-guessing adversary.
 *
 * Phase 1: impersonate the user with R1 = r1 × G (no HPW blinding) and
 * capture the server's CHALLENGE(realm, R2, h1). The server unwittingly
 * computed SK_S = HPW⁻¹·r1·r2 × G.
 *
 * Phase 2, per candidate PW': HPW' = h(username ∥ PW'),
 * SK' = HPW'⁻¹·r1 × R2, match iff h1 == h(SK' ∥ R2). One hash, one
 * inversion mod n, one multiplication mod n and one scalar_mul by R2 per
 * guess — no base-point multiplication and no further network I/O.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "authlab/codec.hpp"
#include "authlab/ecc.hpp"
#include "authlab/errors.hpp"
#include "authlab/protocol.hpp"
#include "authlab/random.hpp"

namespace authlab {

/// What the adversary must remember between Phase 1 and Phase 2.
struct AttackState {
    std::string username;
    Scalar r1;
    CurveParams curve;
};

/// Ordered candidate list. Order is significant (stats are defined against
/// it); duplicates are dropped keeping the first occurrence.
class Dictionary {
public:
    explicit Dictionary(std::vector<std::string> candidates) {
        entries_.reserve(candidates.size());
        std::unordered_set<std::string_view> seen;
        for (auto& cand : candidates) {
            if (seen.count(cand)) continue;
            entries_.push_back(std::move(cand));
            seen.insert(entries_.back());
        }
    }

    /// One candidate per line, UTF-8, LF endings; empty lines ignored.
    static Dictionary load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoFailure("cannot open dictionary: " + path.string());
        std::vector<std::string> candidates;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty())
                candidates.push_back(line);
        return Dictionary(std::move(candidates));
    }

    const std::vector<std::string>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<std::string> entries_;
};

struct AttackStats {
    std::size_t guesses_tried = 0;
    std::size_t skipped_degenerate = 0;
    double elapsed_s = 0.0;
    double rate_gps = 0.0;
    std::optional<std::size_t> found_index;
};

struct ScanResult {
    std::optional<std::string> password;
    AttackStats stats;
};

/// Phase 1: forge REQUEST(username, r1 × G) and remember r1.
inline std::pair<AttackState, RequestMsg> forge_request(const std::string& username,
                                                        const CurveParams& curve,
                                                        RandomSource& rng) {
    const Scalar r1 = random_scalar(curve, rng);
    const Point r1_point = scalar_mul(curve, r1, curve.base_point());
    return {AttackState{username, r1, curve}, RequestMsg{username, r1_point}};
}

/// Phase 2, one candidate. Pure function of captured material: no I/O.
/// A candidate whose HPW' reduces to 0 mod n has no inverse; it is reported
/// as a non-match (and flagged degenerate) rather than aborting the scan.
inline bool check_guess(const AttackState& state, const ChallengeMsg& challenge,
                        std::string_view candidate, bool* degenerate = nullptr) {
    if (degenerate) *degenerate = false;
    if (challenge.r2_point.is_infinity() ||
        !validate_point(state.curve, challenge.r2_point))
        throw InvalidPoint("captured R2 must be a valid non-infinity curve point");

    const Digest hpw_guess = hash_concat(state.username, candidate);
    Scalar hpw_scalar;
    try {
        hpw_scalar = digest_to_scalar(hpw_guess, state.curve);
    } catch (const ScalarDegenerate&) {
        if (degenerate) *degenerate = true;
        return false;
    }
    const Scalar t =
        mul_scalars(state.curve, scalar_inv(state.curve, hpw_scalar), state.r1);
    const Point sk_guess = scalar_mul(state.curve, t, challenge.r2_point);
    const Bytes sk_enc = encode_point(state.curve, sk_guess);
    const Bytes r2_enc = encode_point(state.curve, challenge.r2_point);
    return hash_concat(sk_enc, r2_enc) == challenge.h1;
}

namespace detail {

/// Ordered index dispenser with a bounded in-flight window of `workers`
/// indices. The window is what makes the work bound hard:
/// guesses_tried <= found_index + workers, and the lowest matching index
/// wins no matter how many workers race.
class ScanCoordinator {
public:
    ScanCoordinator(std::size_t total, std::size_t workers)
        : total_(total), window_(workers), done_(total, false) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    bool claim(std::size_t& index) {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] {
            return stop_claiming() || next_ < lowest_incomplete_ + window_;
        });
        if (stop_claiming()) return false;
        index = next_++;
        return true;
    }

    void complete(std::size_t index, bool matched, bool degenerate) {
        std::unique_lock lk(mu_);
        done_[index] = true;
        while (lowest_incomplete_ < total_ && done_[lowest_incomplete_])
            ++lowest_incomplete_;
        ++tried_;
        if (degenerate) ++skipped_;
        if (matched && index < best_) best_ = index;
        cv_.notify_all();
    }

    std::size_t best() const { return best_; }
    std::size_t tried() const { return tried_; }
    std::size_t skipped() const { return skipped_; }

private:
    bool stop_claiming() const { return next_ >= total_ || best_ < next_; }

    const std::size_t total_;
    const std::size_t window_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::vector<bool> done_;
    std::size_t next_ = 0;
    std::size_t lowest_incomplete_ = 0;
    std::size_t best_ = npos;
    std::size_t tried_ = 0;
    std::size_t skipped_ = 0;
};

} // namespace detail

/// Phase 2, whole dictionary. Returns the matching candidate with the
/// lowest index, or none after exhaustion. workers = 1 scans strictly
/// sequentially with guesses_tried = found_index + 1.
inline ScanResult run_dictionary(const AttackState& state, const ChallengeMsg& challenge,
                                 const Dictionary& dict, unsigned workers = 1) {
    if (workers < 1)
        throw ConfigError("run_dictionary: workers must be >= 1");
    const auto& entries = dict.entries();
    const auto t0 = std::chrono::steady_clock::now();

    detail::ScanCoordinator coord(entries.size(), workers);
    auto scan = [&] {
        std::size_t index = 0;
        while (coord.claim(index)) {
            bool degenerate = false;
            const bool matched = check_guess(state, challenge, entries[index], &degenerate);
            coord.complete(index, matched, degenerate);
        }
    };
    if (workers == 1 || entries.size() <= 1) {
        scan();
    } else {
        std::vector<std::jthread> pool;
        const unsigned count = static_cast<unsigned>(
            std::min<std::size_t>(workers, entries.size()));
        pool.reserve(count);
        for (unsigned i = 0; i < count; ++i)
            pool.emplace_back(scan);
    }

    const auto t1 = std::chrono::steady_clock::now();
    ScanResult result;
    result.stats.guesses_tried = coord.tried();
    result.stats.skipped_degenerate = coord.skipped();
    result.stats.elapsed_s = std::chrono::duration<double>(t1 - t0).count();
    if (result.stats.elapsed_s > 0)
        result.stats.rate_gps = static_cast<double>(coord.tried()) / result.stats.elapsed_s;
    if (coord.best() != detail::ScanCoordinator::npos) {
        result.stats.found_index = coord.best();
        result.password = entries[coord.best()];
    }
    return result;
}

/// Benchmark surface: synthesize a self-consistent verifier + challenge
/// fixture from the seed, plant the password last, and measure a full scan.
inline ScanResult bench_guess_rate(const CurveParams& curve, std::size_t dict_size,
                                   std::uint64_t seed, unsigned workers = 1) {
    if (dict_size < 1)
        throw ConfigError("bench_guess_rate: dict_size must be >= 1");
    SeededRandom rng(seed);

    Bytes key_bytes(32);
    rng.fill(key_bytes);
    const ServerKey server_key(std::move(key_bytes));

    std::vector<std::string> candidates;
    candidates.reserve(dict_size);
    for (std::size_t i = 0; i < dict_size; ++i)
        candidates.push_back("candidate_" + std::to_string(seed) + "_" + std::to_string(i));
    const std::string username = "bench_user";

    // The planted password must have a usable HPW; on tiny curves a draw can
    // be degenerate, so probe deterministically until one registers.
    std::string password;
    std::optional<VerifierRecord> record;
    for (std::uint64_t k = 0; !record; ++k) {
        password = "bench_pw_" + std::to_string(seed) + "_" + std::to_string(k);
        try {
            record = register_user(username, password, server_key, curve);
        } catch (const ScalarDegenerate&) {
        }
    }
    candidates.back() = password;
    auto [state, request] = forge_request(username, curve, rng);
    auto [session, challenge] =
        server_challenge(request, *record, server_key, "bench_realm", curve, rng);
    (void)session;

    return run_dictionary(state, challenge, Dictionary(std::move(candidates)), workers);
}

} // namespace authlab
