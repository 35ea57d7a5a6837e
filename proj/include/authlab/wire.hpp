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
 * SIP-flavored line grammar (UTF-8, one LF-terminated line per message,
 * single-space separators):
 *
 *   REQUEST <username> <hex(encode_point(R1))>
 *   CHALLENGE <realm> <hex(encode_point(R2))> <hex(h1)>
 *   RESPONSE <username> <realm> <hex(h2)>
 *   OK
 *   REJECT <code>      code in {UNKNOWN_USER, INVALID_POINT, AUTH_FAILED,
 *                               MALFORMED, DEGENERATE}
 *
 * One authentication exchange per connection; the server enforces message
 * order and discards the session either way.
 */

#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "authlab/attack.hpp"
#include "authlab/bytes.hpp"
#include "authlab/codec.hpp"
#include "authlab/ecc.hpp"
#include "authlab/errors.hpp"
#include "authlab/protocol.hpp"
#include "authlab/random.hpp"
#include "authlab/store.hpp"
#include "authlab/transport.hpp"

namespace authlab {

enum class RejectCode {
    UnknownUser,
    InvalidPointCode,
    AuthFailed,
    Malformed,
    Degenerate,
};

inline std::string_view reject_token(RejectCode code) {
    switch (code) {
        case RejectCode::UnknownUser: return "UNKNOWN_USER";
        case RejectCode::InvalidPointCode: return "INVALID_POINT";
        case RejectCode::AuthFailed: return "AUTH_FAILED";
        case RejectCode::Malformed: return "MALFORMED";
        case RejectCode::Degenerate: return "DEGENERATE";
    }
    throw Error("unreachable reject code");
}

inline std::optional<RejectCode> reject_code_from_token(std::string_view token) {
    if (token == "UNKNOWN_USER") return RejectCode::UnknownUser;
    if (token == "INVALID_POINT") return RejectCode::InvalidPointCode;
    if (token == "AUTH_FAILED") return RejectCode::AuthFailed;
    if (token == "MALFORMED") return RejectCode::Malformed;
    if (token == "DEGENERATE") return RejectCode::Degenerate;
    return std::nullopt;
}

/// Step-4 accept/reject, the only message Fig. 1 leaves implicit.
struct OutcomeMsg {
    bool ok = false;
    std::optional<RejectCode> code;   // present iff !ok

    static OutcomeMsg accept() { return OutcomeMsg{true, std::nullopt}; }
    static OutcomeMsg reject(RejectCode c) { return OutcomeMsg{false, c}; }

    friend bool operator==(const OutcomeMsg&, const OutcomeMsg&) = default;
};

using WireMessage = std::variant<RequestMsg, ChallengeMsg, ResponseMsg, OutcomeMsg>;

/// The peer answered REJECT <code>.
class Rejected : public Error {
public:
    explicit Rejected(RejectCode c)
        : Error("rejected by peer: " + std::string(reject_token(c))), code(c) {}
    RejectCode code;
};

inline std::string encode_msg(const CurveParams& curve, const WireMessage& msg) {
    std::ostringstream out;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RequestMsg>) {
                out << "REQUEST " << m.username << ' '
                    << to_hex(encode_point(curve, m.r1_point));
            } else if constexpr (std::is_same_v<T, ChallengeMsg>) {
                out << "CHALLENGE " << m.realm << ' '
                    << to_hex(encode_point(curve, m.r2_point)) << ' '
                    << to_hex(m.h1.bytes);
            } else if constexpr (std::is_same_v<T, ResponseMsg>) {
                out << "RESPONSE " << m.username << ' ' << m.realm << ' '
                    << to_hex(m.h2.bytes);
            } else {
                if (m.ok) {
                    out << "OK";
                } else {
                    if (!m.code)
                        throw Error("REJECT outcome requires a code");
                    out << "REJECT " << reject_token(*m.code);
                }
            }
        },
        msg);
    return out.str();
}

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t start = 0;
    while (start <= line.size()) {
        const auto space = line.find(' ', start);
        if (space == std::string_view::npos) {
            tokens.push_back(line.substr(start));
            break;
        }
        tokens.push_back(line.substr(start, space - start));
        start = space + 1;
    }
    return tokens;
}

inline std::string require_identifier(std::string_view token, const char* what) {
    if (!valid_identifier(token))
        throw MalformedEncoding(std::string(what) + " violates charset policy");
    return std::string(token);
}

inline Digest parse_digest(std::string_view hex, const char* what) {
    const Bytes raw = from_hex(hex);
    if (raw.size() != kDigestSize)
        throw MalformedEncoding(std::string(what) + " must be 32 bytes of hex");
    Digest d;
    std::copy(raw.begin(), raw.end(), d.bytes.begin());
    return d;
}

inline Point parse_point(const CurveParams& curve, std::string_view hex) {
    const Bytes raw = from_hex(hex);
    return decode_point(curve, raw);   // MalformedEncoding / InvalidPoint
}

} // namespace detail

/// Throws MalformedEncoding on any grammar violation (unknown verb, wrong
/// arity, bad hex, charset, oversized line) and InvalidPoint when a
/// well-formed point encoding is off-curve.
inline WireMessage decode_msg(const CurveParams& curve, std::string_view line) {
    if (line.size() > kMaxLineBytes)
        throw MalformedEncoding("line exceeds 4096 bytes");
    const auto tokens = detail::split_tokens(line);
    for (const auto& t : tokens)
        if (t.empty())
            throw MalformedEncoding("empty token (doubled or trailing space)");
    if (tokens.empty())
        throw MalformedEncoding("empty line");

    const std::string_view verb = tokens[0];
    if (verb == "REQUEST") {
        if (tokens.size() != 3)
            throw MalformedEncoding("REQUEST takes exactly 2 arguments");
        RequestMsg m;
        m.username = detail::require_identifier(tokens[1], "username");
        m.r1_point = detail::parse_point(curve, tokens[2]);
        return m;
    }
    if (verb == "CHALLENGE") {
        if (tokens.size() != 4)
            throw MalformedEncoding("CHALLENGE takes exactly 3 arguments");
        ChallengeMsg m;
        m.realm = detail::require_identifier(tokens[1], "realm");
        m.r2_point = detail::parse_point(curve, tokens[2]);
        m.h1 = detail::parse_digest(tokens[3], "h1");
        return m;
    }
    if (verb == "RESPONSE") {
        if (tokens.size() != 4)
            throw MalformedEncoding("RESPONSE takes exactly 3 arguments");
        ResponseMsg m;
        m.username = detail::require_identifier(tokens[1], "username");
        m.realm = detail::require_identifier(tokens[2], "realm");
        m.h2 = detail::parse_digest(tokens[3], "h2");
        return m;
    }
    if (verb == "OK") {
        if (tokens.size() != 1)
            throw MalformedEncoding("OK takes no arguments");
        return OutcomeMsg::accept();
    }
    if (verb == "REJECT") {
        if (tokens.size() != 2)
            throw MalformedEncoding("REJECT takes exactly 1 argument");
        const auto code = reject_code_from_token(tokens[1]);
        if (!code)
            throw MalformedEncoding("unknown REJECT code");
        return OutcomeMsg::reject(*code);
    }
    throw MalformedEncoding("unknown verb");
}

/// One REQUEST -> CHALLENGE -> RESPONSE -> outcome exchange on an accepted
/// connection. Every error path sends REJECT with the mapped code; peer
/// disconnects and timeouts end the session silently (that disconnect after
/// CHALLENGE is exactly the attack's Phase 1 footprint).
inline void handle_connection(Stream& stream, VerifierStore& store,
                              const ServerKey& server_key, const std::string& realm,
                              const CurveParams& curve) {
    LineChannel ch(stream);
    const auto reject = [&](RejectCode code) {
        try {
            ch.write_line(encode_msg(curve, OutcomeMsg::reject(code)));
        } catch (const TransportError&) {
        }
    };
    try {
        WireMessage first;
        try {
            first = decode_msg(curve, ch.read_line());
        } catch (const InvalidPoint&) {
            return reject(RejectCode::InvalidPointCode);
        } catch (const MalformedEncoding&) {
            return reject(RejectCode::Malformed);
        }
        const auto* request = std::get_if<RequestMsg>(&first);
        if (!request)
            return reject(RejectCode::Malformed);   // out-of-order verb

        VerifierRecord record;
        try {
            record = store.get(request->username);
        } catch (const UnknownUser&) {
            return reject(RejectCode::UnknownUser);
        }

        ServerSession session;
        ChallengeMsg challenge;
        try {
            std::tie(session, challenge) = [&] {
                SystemRandom rng;
                return server_challenge(*request, record, server_key, realm, curve, rng);
            }();
        } catch (const InvalidPoint&) {
            return reject(RejectCode::InvalidPointCode);
        } catch (const ScalarDegenerate&) {
            return reject(RejectCode::Degenerate);
        }
        ch.write_line(encode_msg(curve, challenge));

        WireMessage second;
        try {
            second = decode_msg(curve, ch.read_line());
        } catch (const InvalidPoint&) {
            return reject(RejectCode::InvalidPointCode);
        } catch (const MalformedEncoding&) {
            return reject(RejectCode::Malformed);
        }
        const auto* response = std::get_if<ResponseMsg>(&second);
        if (!response)
            return reject(RejectCode::Malformed);

        try {
            server_verify(session, *response);
        } catch (const UserAuthFailed&) {
            return reject(RejectCode::AuthFailed);
        } catch (const SessionMismatch&) {
            return reject(RejectCode::Malformed);
        }
        ch.write_line(encode_msg(curve, OutcomeMsg::accept()));
    } catch (const TransportError&) {
        // Peer went away or stalled past the deadline; nothing to answer.
    }
}

struct ServeOptions {
    std::chrono::milliseconds read_timeout{10000};
};

/// Accepting TCP server: one thread per connection, every per-connection
/// error contained. Construction binds and starts serving immediately.
class Server {
public:
    Server(const std::string& host, std::uint16_t port, VerifierStore& store,
           ServerKey server_key, std::string realm, const CurveParams& curve,
           ServeOptions options = {})
        : listener_(host, port),
          store_(store),
          server_key_(std::move(server_key)),
          realm_(std::move(realm)),
          curve_(curve),
          options_(options) {
        if (store_.curve_name() != curve_.name)
            throw ConfigError("store curve '" + store_.curve_name() +
                              "' does not match serving curve '" + curve_.name + "'");
        if (!valid_identifier(realm_))
            throw ConfigError("realm must match [A-Za-z0-9._-]{1,64}");
        accept_thread_ = std::jthread([this](std::stop_token st) { accept_loop(st); });
    }

    ~Server() { stop(); }
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const { return listener_.port(); }

    void stop() {
        if (accept_thread_.joinable()) {
            accept_thread_.request_stop();
            accept_thread_.join();
        }
        std::lock_guard lk(handlers_mu_);
        handlers_.clear();   // joins every handler
    }

    /// Blocks until stop() is called from another thread (CLI serve mode).
    void wait() {
        if (accept_thread_.joinable())
            accept_thread_.join();
    }

private:
    struct Handler {
        std::shared_ptr<std::atomic<bool>> finished;
        std::jthread thread;
    };

    void accept_loop(std::stop_token st) {
        while (!st.stop_requested()) {
            std::unique_ptr<TcpStream> conn;
            try {
                conn = listener_.accept(std::chrono::milliseconds(100));
            } catch (const TransportError&) {
                break;   // listener gone
            }
            if (!conn) continue;
            conn->set_read_timeout(options_.read_timeout);
            auto finished = std::make_shared<std::atomic<bool>>(false);
            auto task = [this, finished, c = std::shared_ptr<TcpStream>(std::move(conn))] {
                try {
                    handle_connection(*c, store_, server_key_, realm_, curve_);
                } catch (...) {
                    // contained: the accept loop must survive anything
                }
                finished->store(true);
            };
            std::lock_guard lk(handlers_mu_);
            std::erase_if(handlers_, [](const Handler& h) { return h.finished->load(); });
            handlers_.push_back(Handler{finished, std::jthread(task)});
        }
    }

    TcpListener listener_;
    VerifierStore& store_;
    ServerKey server_key_;
    std::string realm_;
    CurveParams curve_;
    ServeOptions options_;
    std::mutex handlers_mu_;
    std::vector<Handler> handlers_;
    std::jthread accept_thread_;
};

/// Client side of the full exchange. Raises ServerAuthFailed locally at the
/// h1 check (before any RESPONSE leaves), Rejected on a peer REJECT.
inline SessionKey client_exchange(Stream& conn, const std::string& username,
                                  const std::string& password,
                                  const CurveParams& curve, RandomSource& rng) {
    LineChannel ch(conn);
    auto [state, request] = client_begin(username, password, curve, rng);
    ch.write_line(encode_msg(curve, request));

    const WireMessage reply = decode_msg(curve, ch.read_line());
    if (const auto* outcome = std::get_if<OutcomeMsg>(&reply)) {
        if (!outcome->ok && outcome->code)
            throw Rejected(*outcome->code);
        throw MalformedEncoding("unexpected outcome before CHALLENGE");
    }
    const auto* challenge = std::get_if<ChallengeMsg>(&reply);
    if (!challenge)
        throw MalformedEncoding("expected CHALLENGE");

    auto [key, response] = client_respond(state, *challenge);
    ch.write_line(encode_msg(curve, response));

    const WireMessage verdict = decode_msg(curve, ch.read_line());
    const auto* outcome = std::get_if<OutcomeMsg>(&verdict);
    if (!outcome)
        throw MalformedEncoding("expected OK or REJECT");
    if (!outcome->ok)
        throw Rejected(outcome->code.value_or(RejectCode::Malformed));
    return key;
}

/// Adversary's Phase 1 on the wire: forge, send, capture the CHALLENGE.
/// The connection is disposable afterwards.
inline std::pair<AttackState, ChallengeMsg> adversary_exchange(Stream& conn,
                                                               const std::string& username,
                                                               const CurveParams& curve,
                                                               RandomSource& rng) {
    LineChannel ch(conn);
    auto [state, request] = forge_request(username, curve, rng);
    ch.write_line(encode_msg(curve, request));

    const WireMessage reply = decode_msg(curve, ch.read_line());
    if (const auto* outcome = std::get_if<OutcomeMsg>(&reply)) {
        if (!outcome->ok && outcome->code)
            throw Rejected(*outcome->code);
        throw MalformedEncoding("unexpected outcome before CHALLENGE");
    }
    const auto* challenge = std::get_if<ChallengeMsg>(&reply);
    if (!challenge)
        throw MalformedEncoding("expected CHALLENGE");
    return {std::move(state), *challenge};
}

} // namespace authlab
