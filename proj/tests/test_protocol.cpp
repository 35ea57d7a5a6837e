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

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <authlab/authlab.hpp>

#include "support.hpp"

using namespace authlab;
using testsupport::ScriptedScalars;

namespace {

ServerKey fixed_key() {
    return ServerKey(Bytes(32, 0x42));
}

/// toy17 credentials chosen at runtime so HPW is non-degenerate.
std::string usable_toy_password(const std::string& username) {
    const auto& c = toy17();
    for (int i = 0;; ++i) {
        const std::string password = "pw" + std::to_string(i);
        try {
            digest_to_scalar(hash_concat(username, password), c);
            return password;
        } catch (const ScalarDegenerate&) {
        }
    }
}

/// toy17 password whose HPW scalar differs from the reference password's
/// (wrong-password tests need non-colliding fixtures on a 19-point group).
std::string non_colliding_toy_password(const std::string& username,
                                       const std::string& reference) {
    const auto& c = toy17();
    const Scalar ref = digest_to_scalar(hash_concat(username, reference), c);
    for (int i = 0;; ++i) {
        const std::string password = "wrong" + std::to_string(i);
        try {
            if (digest_to_scalar(hash_concat(username, password), c) != ref)
                return password;
        } catch (const ScalarDegenerate&) {
        }
    }
}

} // namespace

TEST_CASE("register derives the password verifier") {
    const auto& c = p256();
    const ServerKey key = fixed_key();
    const VerifierRecord rec = register_user("alice", "1234", key, c);

    // xor'ing HK_S back out must recover HPW
    const Digest hks = hash_concat("alice", key.bytes);
    REQUIRE(xor_digests(rec.vpw, hks) == hash_concat("alice", "1234"));
    REQUIRE(rec.username == "alice");
}

TEST_CASE("register binds the username into the verifier") {
    const auto& c = p256();
    const ServerKey key = fixed_key();
    REQUIRE(register_user("alice", "shared", key, c).vpw !=
            register_user("bob", "shared", key, c).vpw);
}

TEST_CASE("register input policy") {
    const auto& c = p256();
    const ServerKey key = fixed_key();
    REQUIRE_THROWS_AS(register_user("a b", "pw", key, c), BadUsername);
    REQUIRE_THROWS_AS(register_user("", "pw", key, c), BadUsername);
    REQUIRE_THROWS_AS(register_user("alice", "", key, c), BadPassword);
}

TEST_CASE("register rejects passwords with degenerate HPW") {
    // On toy17 roughly 1 in 19 passwords reduces to 0 mod n; find one.
    const auto& c = toy17();
    const ServerKey key = fixed_key();
    std::string degenerate;
    for (int i = 0;; ++i) {
        const std::string candidate = "deg" + std::to_string(i);
        if (testsupport::horner_digest_mod(hash_concat("alice", candidate), c.n) == 0) {
            degenerate = candidate;
            break;
        }
    }
    REQUIRE_THROWS_AS(register_user("alice", degenerate, key, c), ScalarDegenerate);
}

TEST_CASE("client_begin computes R1 = (HPW*r1) x G") {
    const auto& c = toy17();
    const std::string password = usable_toy_password("alice");

    ScriptedScalars rng({BigInt(3)});
    auto [state, request] = client_begin("alice", password, c, rng);

    REQUIRE(state.r1 == Scalar{3});
    REQUIRE(state.hpw == hash_concat("alice", password));
    REQUIRE(state.hpw_scalar == digest_to_scalar(state.hpw, c));
    REQUIRE(request.username == "alice");
    REQUIRE_FALSE(request.r1_point.is_infinity());
    REQUIRE(request.r1_point ==
            scalar_mul(c, mul_scalars(c, state.hpw_scalar, state.r1), c.base_point()));
}

TEST_CASE("client_begin with injected r1 = HPW^-1 emits the base point") {
    const auto& c = p256();
    const Digest hpw = hash_concat("alice", "hunter2");
    const Scalar inv = scalar_inv(c, digest_to_scalar(hpw, c));

    ScriptedScalars rng({inv.value});
    auto [state, request] = client_begin("alice", "hunter2", c, rng);
    REQUIRE(request.r1_point == c.base_point());
}

TEST_CASE("client_begin redraws when the rng yields 0") {
    const auto& c = toy17();
    const std::string password = usable_toy_password("alice");
    // 1-byte draws on toy17: two zeros must be rejected, then 5 accepted
    testsupport::FixedRandom rng(Bytes{0x00, 0x00, 0x05});
    auto [state, request] = client_begin("alice", password, c, rng);
    REQUIRE(state.r1 == Scalar{5});
    REQUIRE_FALSE(request.r1_point.is_infinity());
}

TEST_CASE("server_challenge unblinds R1 and commits to h2") {
    const auto& c = toy17();
    const ServerKey key = fixed_key();
    const std::string password = usable_toy_password("alice");
    const VerifierRecord rec = register_user("alice", password, key, c);

    ScriptedScalars client_rng({BigInt(3)});
    auto [client, request] = client_begin("alice", password, c, client_rng);

    ScriptedScalars server_rng({BigInt(5)});
    auto [session, challenge] =
        server_challenge(request, rec, key, "sip.example", c, server_rng);

    // R'1 = r1 x G, so SK_S = r2 x R'1 = (r1*r2) x G
    REQUIRE(session.sk == scalar_mul(c, BigInt(15), c.base_point()));
    REQUIRE(session.r2 == Scalar{5});
    REQUIRE(challenge.realm == "sip.example");
    REQUIRE(challenge.r2_point == scalar_mul(c, BigInt(5), c.base_point()));
    REQUIRE(challenge.h1 == hash_concat(encode_point(c, session.sk),
                                        encode_point(c, challenge.r2_point)));
    REQUIRE(session.expected_h2 ==
            hash_concat("alice", "sip.example", encode_point(c, session.sk)));
}

TEST_CASE("server_challenge input policy") {
    const auto& c = toy17();
    const ServerKey key = fixed_key();
    const std::string password = usable_toy_password("alice");
    const VerifierRecord rec = register_user("alice", password, key, c);
    ScriptedScalars rng({BigInt(5)});

    SECTION("infinity R1") {
        RequestMsg msg{"alice", Point::at_infinity()};
        REQUIRE_THROWS_AS(server_challenge(msg, rec, key, "r", c, rng), InvalidPoint);
    }
    SECTION("off-curve R1") {
        RequestMsg msg{"alice", Point::affine(5, 2)};
        REQUIRE_THROWS_AS(server_challenge(msg, rec, key, "r", c, rng), InvalidPoint);
    }
    SECTION("record for a different user") {
        RequestMsg msg{"bob", c.base_point()};
        REQUIRE_THROWS_AS(server_challenge(msg, rec, key, "r", c, rng), SessionMismatch);
    }
    SECTION("degenerate recovered HPW") {
        // vpw == HK_S makes the recovered HPW the all-zero digest
        const VerifierRecord bad{"alice", hash_concat("alice", key.bytes)};
        RequestMsg msg{"alice", c.base_point()};
        REQUIRE_THROWS_AS(server_challenge(msg, bad, key, "r", c, rng), ScalarDegenerate);
    }
    SECTION("bad realm is a configuration error") {
        RequestMsg msg{"alice", c.base_point()};
        REQUIRE_THROWS_AS(server_challenge(msg, rec, key, "bad realm", c, rng), ConfigError);
    }
}

TEST_CASE("client_respond authenticates the server then answers") {
    const auto& c = toy17();
    const ServerKey key = fixed_key();
    const std::string password = usable_toy_password("alice");
    const VerifierRecord rec = register_user("alice", password, key, c);

    ScriptedScalars client_rng({BigInt(3)});
    auto [client, request] = client_begin("alice", password, c, client_rng);
    ScriptedScalars server_rng({BigInt(5)});
    auto [session, challenge] =
        server_challenge(request, rec, key, "sip.example", c, server_rng);

    SECTION("honest challenge") {
        auto [key_u, response] = client_respond(client, challenge);
        REQUIRE(key_u.point == session.sk);
        REQUIRE(key_u.point == scalar_mul(c, BigInt(15), c.base_point()));
        REQUIRE(key_u.export_digest == sha256(encode_point(c, key_u.point)));
        REQUIRE(response.username == "alice");
        REQUIRE(response.realm == "sip.example");
        REQUIRE(response.h2 == session.expected_h2);
    }

    SECTION("one flipped h1 bit") {
        ChallengeMsg tampered = challenge;
        tampered.h1.bytes[0] ^= 0x01;
        REQUIRE_THROWS_AS(client_respond(client, tampered), ServerAuthFailed);
    }

    SECTION("infinity or off-curve R2") {
        ChallengeMsg bad = challenge;
        bad.r2_point = Point::at_infinity();
        REQUIRE_THROWS_AS(client_respond(client, bad), InvalidPoint);
        bad.r2_point = Point::affine(5, 2);
        REQUIRE_THROWS_AS(client_respond(client, bad), InvalidPoint);
    }

    SECTION("charset-violating realm") {
        ChallengeMsg bad = challenge;
        bad.realm = "sip example";
        REQUIRE_THROWS_AS(client_respond(client, bad), MalformedEncoding);
    }
}

TEST_CASE("server_verify") {
    const auto& c = toy17();
    const ServerKey key = fixed_key();
    const std::string password = usable_toy_password("alice");
    const VerifierRecord rec = register_user("alice", password, key, c);

    ScriptedScalars client_rng({BigInt(3)});
    auto [client, request] = client_begin("alice", password, c, client_rng);
    ScriptedScalars server_rng({BigInt(5)});
    auto [session, challenge] =
        server_challenge(request, rec, key, "sip.example", c, server_rng);
    auto [key_u, response] = client_respond(client, challenge);

    SECTION("honest response accepted, keys agree") {
        const SessionKey key_s = server_verify(session, response);
        REQUIRE(key_s.point == key_u.point);
        REQUIRE(key_s.export_digest == key_u.export_digest);
    }

    SECTION("tampered h2") {
        ResponseMsg bad = response;
        bad.h2.bytes[31] ^= 0x80;
        REQUIRE_THROWS_AS(server_verify(session, bad), UserAuthFailed);
    }

    SECTION("echoed identity does not match the session") {
        ResponseMsg bad = response;
        bad.username = "bob";
        REQUIRE_THROWS_AS(server_verify(session, bad), SessionMismatch);
        bad = response;
        bad.realm = "other.realm";
        REQUIRE_THROWS_AS(server_verify(session, bad), SessionMismatch);
    }
}

TEST_CASE("completeness over random credentials and nonces") {
    std::mt19937_64 gen(77);

    auto run_once = [&](const CurveParams& c) {
        const ServerKey key = testsupport::random_server_key(gen);
        std::string username;
        std::string password;
        VerifierRecord rec;
        for (;;) {
            username = testsupport::random_identifier(gen);
            password = "pw_" + testsupport::random_identifier(gen);
            try {
                rec = register_user(username, password, key, c);
                break;
            } catch (const ScalarDegenerate&) {
                // roughly 1/n of draws on toy17; try new credentials
            }
        }
        SystemRandom rng;
        auto [client, request] = client_begin(username, password, c, rng);
        auto [session, challenge] = server_challenge(request, rec, key, "realm", c, rng);
        auto [key_u, response] = client_respond(client, challenge);
        const SessionKey key_s = server_verify(session, response);
        REQUIRE(key_u.point == key_s.point);
        REQUIRE(key_u.point ==
                scalar_mul(c, mul_scalars(c, client.r1, session.r2), c.base_point()));
        REQUIRE_FALSE(key_u.point.is_infinity());
    };

    for (int i = 0; i < 50; ++i)
        run_once(toy17());
    for (int i = 0; i < 5; ++i)
        run_once(p256());
}

TEST_CASE("wrong password fails at the client's h1 check") {
    SECTION("p256, random wrong password") {
        const auto& c = p256();
        const ServerKey key = fixed_key();
        const VerifierRecord rec = register_user("alice", "correct-horse", key, c);
        SystemRandom rng;
        auto [client, request] = client_begin("alice", "battery-staple", c, rng);
        auto [session, challenge] = server_challenge(request, rec, key, "realm", c, rng);
        REQUIRE_THROWS_AS(client_respond(client, challenge), ServerAuthFailed);
    }

    SECTION("toy17, pinned non-colliding fixture") {
        const auto& c = toy17();
        const ServerKey key = fixed_key();
        const std::string good = usable_toy_password("alice");
        const std::string bad = non_colliding_toy_password("alice", good);
        const VerifierRecord rec = register_user("alice", good, key, c);
        SystemRandom rng;
        auto [client, request] = client_begin("alice", bad, c, rng);
        auto [session, challenge] = server_challenge(request, rec, key, "realm", c, rng);
        REQUIRE_THROWS_AS(client_respond(client, challenge), ServerAuthFailed);
    }
}

TEST_CASE("server key material is guarded") {
    REQUIRE_THROWS_AS(ServerKey(Bytes(16, 0x01)), ConfigError);
    REQUIRE_NOTHROW(ServerKey(Bytes(32, 0x01)));
    REQUIRE(ServerKey::from_hex(std::string(64, 'a')).bytes.size() == 32);
}
