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
 * Operator entry point: register, serve, login, attack, bench.
 *
 * stdout carries only machine-readable results (the session-key hex for
 * login, one JSON object for attack/bench); diagnostics go to stderr.
 * Exit codes: 0 success/found, 1 authentication failure/not found,
 * 2 usage or configuration error.
 */

#include <termios.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <authlab/authlab.hpp>

namespace {

using nlohmann::json;

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

Endpoint parse_endpoint(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw authlab::ConfigError("address must be HOST:PORT: " + text);
    const std::string host = text.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw authlab::ConfigError("bad port in address: " + text);
    }
    if (port < 0 || port > 65535)
        throw authlab::ConfigError("port out of range: " + text);
    return Endpoint{host, static_cast<std::uint16_t>(port)};
}

/// Precedence: --curve/--curve-file flag > AUTHLAB_CURVE env > p256.
authlab::CurveParams resolve_curve(const std::string& curve_flag,
                                   const std::string& curve_file) {
    if (!curve_file.empty())
        return authlab::load_curve_file(curve_file);
    if (!curve_flag.empty())
        return authlab::find_curve(curve_flag);
    if (const char* env = std::getenv("AUTHLAB_CURVE"); env && *env)
        return authlab::find_curve(env);
    return authlab::p256();
}

authlab::ServerKey resolve_server_key(const std::string& key_hex,
                                      const std::string& key_file) {
    if (!key_hex.empty() && !key_file.empty())
        throw authlab::ConfigError("give either --server-key or --key-file, not both");
    if (!key_hex.empty())
        return authlab::ServerKey::from_hex(key_hex);
    if (!key_file.empty()) {
        std::ifstream in(key_file, std::ios::binary);
        if (!in)
            throw authlab::IoFailure("cannot open key file: " + key_file);
        std::string hex;
        in >> hex;
        return authlab::ServerKey::from_hex(hex);
    }
    throw authlab::ConfigError("a server key is required (--server-key or --key-file)");
}

std::string prompt_password(const std::string& label) {
    std::cerr << label << ": " << std::flush;
    termios before{};
    const bool tty = ::tcgetattr(STDIN_FILENO, &before) == 0;
    if (tty) {
        termios silent = before;
        silent.c_lflag &= ~static_cast<tcflag_t>(ECHO);
        ::tcsetattr(STDIN_FILENO, TCSAFLUSH, &silent);
    }
    std::string password;
    std::getline(std::cin, password);
    if (tty) {
        ::tcsetattr(STDIN_FILENO, TCSAFLUSH, &before);
        std::cerr << "\n";
    }
    return password;
}

std::string resolve_password(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    return prompt_password("password");
}

json scan_to_json(const authlab::ScanResult& result) {
    json out;
    out["found"] = result.password.has_value();
    out["password"] = result.password ? json(*result.password) : json(nullptr);
    out["guesses_tried"] = result.stats.guesses_tried;
    out["skipped_degenerate"] = result.stats.skipped_degenerate;
    out["elapsed_s"] = result.stats.elapsed_s;
    out["rate_gps"] = result.stats.rate_gps;
    out["found_index"] =
        result.stats.found_index ? json(*result.stats.found_index) : json(nullptr);
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"SIP ECC mutual-authentication lab: the scheme and its offline "
                 "password-guessing attack"};
    app.require_subcommand(1);

    std::string curve_flag;
    std::string curve_file;
    app.add_option("--curve", curve_flag, "built-in curve name (toy17, p256)");
    app.add_option("--curve-file", curve_file, "custom curve parameter file");

    // register
    auto* cmd_register = app.add_subcommand("register", "add a user verifier to a store file");
    std::string reg_store, reg_user, reg_password, reg_key_hex, reg_key_file;
    bool reg_overwrite = false;
    cmd_register->add_option("--store", reg_store, "verifier store path")->required();
    cmd_register->add_option("--username", reg_user)->required();
    cmd_register->add_option("--password", reg_password, "password (prompted if omitted)");
    cmd_register->add_option("--server-key", reg_key_hex, "server key as hex");
    cmd_register->add_option("--key-file", reg_key_file, "file holding the server key hex");
    cmd_register->add_flag("--overwrite", reg_overwrite, "replace an existing record");

    // serve
    auto* cmd_serve = app.add_subcommand("serve", "run the authentication server");
    std::string srv_store, srv_listen = "127.0.0.1:5060", srv_key_hex, srv_key_file;
    std::string srv_realm = "authlab.example", srv_port_file;
    double srv_timeout_s = 10.0;
    cmd_serve->add_option("--store", srv_store, "verifier store path")->required();
    cmd_serve->add_option("--listen", srv_listen, "listen address HOST:PORT (port 0 = ephemeral)");
    cmd_serve->add_option("--server-key", srv_key_hex, "server key as hex");
    cmd_serve->add_option("--key-file", srv_key_file, "file holding the server key hex");
    cmd_serve->add_option("--realm", srv_realm, "realm sent in CHALLENGE");
    cmd_serve->add_option("--timeout", srv_timeout_s, "per-message read timeout, seconds");
    cmd_serve->add_option("--port-file", srv_port_file, "write the bound port to this file");

    // login
    auto* cmd_login = app.add_subcommand("login", "authenticate and print the session key");
    std::string log_server, log_user, log_password;
    cmd_login->add_option("--server", log_server, "server address HOST:PORT")->required();
    cmd_login->add_option("--username", log_user)->required();
    cmd_login->add_option("--password", log_password, "password (prompted if omitted)");

    // attack
    auto* cmd_attack = app.add_subcommand(
        "attack", "forge a request, capture the challenge, scan a dictionary offline");
    std::string atk_server, atk_user, atk_dict;
    unsigned atk_workers = 1;
    std::optional<std::uint64_t> atk_seed;
    cmd_attack->add_option("--server", atk_server, "server address HOST:PORT")->required();
    cmd_attack->add_option("--username", atk_user)->required();
    cmd_attack->add_option("--dict", atk_dict, "dictionary file, one candidate per line")
        ->required();
    cmd_attack->add_option("--workers", atk_workers, "parallel scan workers");
    cmd_attack->add_option("--seed", atk_seed, "deterministic r1 (testing)");

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "measure offline guess throughput");
    std::size_t bench_size = 10000;
    std::uint64_t bench_seed = 1;
    unsigned bench_workers = 1;
    cmd_bench->add_option("--dict-size", bench_size, "synthetic dictionary size");
    cmd_bench->add_option("--seed", bench_seed, "fixture seed");
    cmd_bench->add_option("--workers", bench_workers, "parallel scan workers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;   // usage errors exit 2; --help exits 0
    }

    if (cmd_register->parsed()) {
        const authlab::CurveParams curve = resolve_curve(curve_flag, curve_file);
        const authlab::ServerKey key = resolve_server_key(reg_key_hex, reg_key_file);
        const std::string password = resolve_password(reg_password);

        authlab::VerifierStore store = std::filesystem::exists(reg_store)
                                           ? authlab::VerifierStore::load(reg_store)
                                           : authlab::VerifierStore(curve.name);
        if (store.curve_name() != curve.name)
            throw authlab::ConfigError("store curve '" + store.curve_name() +
                                       "' does not match configured curve '" +
                                       curve.name + "'");
        store.put(authlab::register_user(reg_user, password, key, curve), reg_overwrite);
        store.save(reg_store);
        std::cerr << "registered " << reg_user << " (" << store.size()
                  << " record(s) in " << reg_store << ")\n";
        return 0;
    }

    if (cmd_serve->parsed()) {
        const authlab::CurveParams curve = resolve_curve(curve_flag, curve_file);
        const authlab::ServerKey key = resolve_server_key(srv_key_hex, srv_key_file);
        authlab::VerifierStore store = authlab::VerifierStore::load(srv_store);
        if (store.curve_name() != curve.name)
            throw authlab::ConfigError("store curve '" + store.curve_name() +
                                       "' does not match serving curve '" +
                                       curve.name + "'; refusing to start");
        const Endpoint ep = parse_endpoint(srv_listen);
        authlab::ServeOptions options;
        options.read_timeout =
            std::chrono::milliseconds(static_cast<long>(srv_timeout_s * 1000.0));
        authlab::Server server(ep.host, ep.port, store, key, srv_realm, curve, options);
        std::cerr << "listening on " << ep.host << ":" << server.port() << " (curve "
                  << curve.name << ", realm " << srv_realm << ")\n";
        if (!srv_port_file.empty()) {
            std::ofstream pf(srv_port_file, std::ios::trunc);
            pf << server.port() << "\n";
        }
        server.wait();
        return 0;
    }

    if (cmd_login->parsed()) {
        const authlab::CurveParams curve = resolve_curve(curve_flag, curve_file);
        const Endpoint ep = parse_endpoint(log_server);
        const std::string password = resolve_password(log_password);
        auto conn = authlab::TcpStream::connect(ep.host, ep.port);
        authlab::SystemRandom rng;
        const authlab::SessionKey key =
            authlab::client_exchange(*conn, log_user, password, curve, rng);
        std::cout << authlab::to_hex(key.export_digest.bytes) << "\n";
        std::cerr << "authenticated as " << log_user << "\n";
        return 0;
    }

    if (cmd_attack->parsed()) {
        const authlab::CurveParams curve = resolve_curve(curve_flag, curve_file);
        const Endpoint ep = parse_endpoint(atk_server);
        const authlab::Dictionary dict = authlab::Dictionary::load(atk_dict);

        std::unique_ptr<authlab::RandomSource> rng;
        if (atk_seed)
            rng = std::make_unique<authlab::SeededRandom>(*atk_seed);
        else
            rng = std::make_unique<authlab::SystemRandom>();

        authlab::AttackState state{{}, {}, curve};
        authlab::ChallengeMsg challenge;
        {
            auto conn = authlab::TcpStream::connect(ep.host, ep.port);
            std::tie(state, challenge) =
                authlab::adversary_exchange(*conn, atk_user, curve, *rng);
            conn->close();   // Phase 2 is offline; drop the transport first
        }
        std::cerr << "challenge captured; scanning " << dict.size()
                  << " candidate(s) with " << atk_workers << " worker(s)\n";
        const authlab::ScanResult result =
            authlab::run_dictionary(state, challenge, dict, atk_workers);
        std::cout << scan_to_json(result).dump() << "\n";
        return result.password ? 0 : 1;
    }

    if (cmd_bench->parsed()) {
        const authlab::CurveParams curve = resolve_curve(curve_flag, curve_file);
        const authlab::ScanResult result =
            authlab::bench_guess_rate(curve, bench_size, bench_seed, bench_workers);
        std::cout << scan_to_json(result).dump() << "\n";
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const authlab::ServerAuthFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const authlab::UserAuthFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const authlab::Rejected& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const authlab::DuplicateUser& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const authlab::UnknownUser& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const authlab::ScalarDegenerate& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const authlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
