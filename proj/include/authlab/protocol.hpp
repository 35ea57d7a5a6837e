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
 * The registration phase and the four-step REQUEST/CHALLENGE/RESPONSE
 * authentication exchange as explicit client and server state machines.
 *
 * Registration:  VPW = h(username ∥ PW) ⊕ h(username ∥ K_S)
 * Login:         R1 = (HPW·r1) × G
 *                R'1 = HPW⁻¹ × R1,  R2 = r2 × G,  SK_S = r2 × R'1
 *                h1 = h(SK_S ∥ R2)
 *                SK_U = r1 × R2,  h2 = h(username ∥ realm ∥ SK_U)
 * Both sides end at SK = r1·r2 × G.
 *
 * The messages carry no hardening beyond the steps above (no replay
 * protection, no transcript binding); this module exists to be attacked
 * by attack.hpp.
 */

#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "authlab/bytes.hpp"
#include "authlab/codec.hpp"
#include "authlab/ecc.hpp"
#include "authlab/errors.hpp"
#include "authlab/random.hpp"

namespace authlab {

/// High-entropy long-term server secret. Never stored with verifiers and
/// never put on the wire.
struct ServerKey {
    Bytes bytes;

    explicit ServerKey(Bytes key) : bytes(std::move(key)) {
        if (bytes.size() < 32)
            throw ConfigError("server key must be at least 32 bytes");
    }

    static ServerKey from_hex(std::string_view hex) {
        return ServerKey(authlab::from_hex(hex));
    }
};

struct VerifierRecord {
    std::string username;
    Digest vpw;

    friend bool operator==(const VerifierRecord&, const VerifierRecord&) = default;
};

struct RequestMsg {
    std::string username;
    Point r1_point;

    friend bool operator==(const RequestMsg&, const RequestMsg&) = default;
};

struct ChallengeMsg {
    std::string realm;
    Point r2_point;
    Digest h1;

    friend bool operator==(const ChallengeMsg&, const ChallengeMsg&) = default;
};

struct ResponseMsg {
    std::string username;
    std::string realm;
    Digest h2;

    friend bool operator==(const ResponseMsg&, const ResponseMsg&) = default;
};

struct ClientState {
    std::string username;
    Digest hpw;
    Scalar hpw_scalar;
    Scalar r1;
    CurveParams curve;
};

/// Single-use server-side login session; discarded after one verify.
struct ServerSession {
    std::string username;
    std::string realm;
    Scalar r2;
    Point sk;
    Digest expected_h2;
    CurveParams curve;
};

struct SessionKey {
    Point point;
    Digest export_digest;   // h(encode_point(point)): the 32 key bytes handed out

    friend bool operator==(const SessionKey&, const SessionKey&) = default;
};

inline SessionKey make_session_key(const CurveParams& c, const Point& pt) {
    return SessionKey{pt, sha256(encode_point(c, pt))};
}

/// Registration: derive the password verifier stored server-side. Rejects
/// passwords whose HPW reduces to 0 mod n — the scheme inverts HPW, so such
/// a password would be unusable at login.
inline VerifierRecord register_user(const std::string& username,
                                    const std::string& password,
                                    const ServerKey& server_key,
                                    const CurveParams& curve) {
    if (!valid_identifier(username))
        throw BadUsername("username must match [A-Za-z0-9._-]{1,64}");
    if (password.empty())
        throw BadPassword("password must be non-empty");
    const Digest hpw = hash_concat(username, password);
    digest_to_scalar(hpw, curve);   // throws ScalarDegenerate if unusable
    const Digest hks = hash_concat(username, server_key.bytes);
    return VerifierRecord{username, xor_digests(hpw, hks)};
}

/// Authentication step 1: pick r1 in Z_n^*, send R1 = (HPW·r1) × G.
inline std::pair<ClientState, RequestMsg> client_begin(const std::string& username,
                                                       const std::string& password,
                                                       const CurveParams& curve,
                                                       RandomSource& rng) {
    if (!valid_identifier(username))
        throw BadUsername("username must match [A-Za-z0-9._-]{1,64}");
    if (password.empty())
        throw BadPassword("password must be non-empty");
    const Digest hpw = hash_concat(username, password);
    const Scalar hpw_scalar = digest_to_scalar(hpw, curve);
    const Scalar r1 = random_scalar(curve, rng);
    const Point r1_point =
        scalar_mul(curve, mul_scalars(curve, hpw_scalar, r1), curve.base_point());
    ClientState state{username, hpw, hpw_scalar, r1, curve};
    return {std::move(state), RequestMsg{username, r1_point}};
}

/// Authentication step 2: recover HPW from the verifier, unblind R1,
/// produce R2 and h1, and remember what h2 must look like.
inline std::pair<ServerSession, ChallengeMsg> server_challenge(
    const RequestMsg& msg, const VerifierRecord& record,
    const ServerKey& server_key, const std::string& realm,
    const CurveParams& curve, RandomSource& rng) {
    if (record.username != msg.username)
        throw SessionMismatch("verifier record does not belong to requesting user");
    if (!valid_identifier(realm))
        throw ConfigError("realm must match [A-Za-z0-9._-]{1,64}");
    if (msg.r1_point.is_infinity() || !validate_point(curve, msg.r1_point))
        throw InvalidPoint("R1 must be a valid non-infinity curve point");

    const Digest hks = hash_concat(msg.username, server_key.bytes);
    const Digest hpw = xor_digests(record.vpw, hks);
    const Scalar hpw_scalar = digest_to_scalar(hpw, curve);   // ScalarDegenerate

    const Point r1_unblinded =
        scalar_mul(curve, scalar_inv(curve, hpw_scalar), msg.r1_point);
    const Scalar r2 = random_scalar(curve, rng);
    const Point r2_point = scalar_mul(curve, r2, curve.base_point());
    const Point sk = scalar_mul(curve, r2, r1_unblinded);

    const Bytes sk_enc = encode_point(curve, sk);
    const Bytes r2_enc = encode_point(curve, r2_point);
    const Digest h1 = hash_concat(sk_enc, r2_enc);
    const Digest expected_h2 = hash_concat(msg.username, realm, sk_enc);

    ServerSession session{msg.username, realm, r2, sk, expected_h2, curve};
    return {std::move(session), ChallengeMsg{realm, r2_point, h1}};
}

/// Authentication step 3: compute SK_U = r1 × R2, authenticate the server
/// via h1, and answer with h2. Raises ServerAuthFailed on h1 mismatch
/// before any response material exists.
inline std::pair<SessionKey, ResponseMsg> client_respond(const ClientState& state,
                                                         const ChallengeMsg& msg) {
    if (!valid_identifier(msg.realm))
        throw MalformedEncoding("realm must match [A-Za-z0-9._-]{1,64}");
    if (msg.r2_point.is_infinity() || !validate_point(state.curve, msg.r2_point))
        throw InvalidPoint("R2 must be a valid non-infinity curve point");

    const Point sk = scalar_mul(state.curve, state.r1, msg.r2_point);
    const Bytes sk_enc = encode_point(state.curve, sk);
    const Bytes r2_enc = encode_point(state.curve, msg.r2_point);
    if (hash_concat(sk_enc, r2_enc) != msg.h1)
        throw ServerAuthFailed("h1 mismatch: challenge rejected");

    const Digest h2 = hash_concat(state.username, msg.realm, sk_enc);
    return {make_session_key(state.curve, sk),
            ResponseMsg{state.username, msg.realm, h2}};
}

/// Authentication step 4: accept iff h2 matches the session's expectation.
inline SessionKey server_verify(const ServerSession& session, const ResponseMsg& msg) {
    if (msg.username != session.username || msg.realm != session.realm)
        throw SessionMismatch("response echoes a different username/realm");
    if (msg.h2 != session.expected_h2)
        throw UserAuthFailed("h2 mismatch: response rejected");
    return make_session_key(session.curve, session.sk);
}

} // namespace authlab
