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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <authlab/authlab.hpp>

#include "support.hpp"

using namespace authlab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "authlab_store_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

VerifierRecord record_for(std::mt19937_64& gen, const std::string& username) {
    return VerifierRecord{username, testsupport::random_digest(gen)};
}

} // namespace

TEST_CASE("put and get") {
    std::mt19937_64 gen(21);
    VerifierStore store("toy17");

    const VerifierRecord alice = record_for(gen, "alice");
    store.put(alice);
    REQUIRE(store.size() == 1);
    REQUIRE(store.get("alice") == alice);

    SECTION("duplicate put is refused without the overwrite flag") {
        REQUIRE_THROWS_AS(store.put(record_for(gen, "alice")), DuplicateUser);
        REQUIRE(store.get("alice") == alice);
    }

    SECTION("overwrite replaces in place") {
        const VerifierRecord updated = record_for(gen, "alice");
        store.put(updated, /*overwrite=*/true);
        REQUIRE(store.size() == 1);
        REQUIRE(store.get("alice") == updated);
    }

    SECTION("unknown user") {
        REQUIRE_THROWS_AS(store.get("bob"), UnknownUser);
    }

    SECTION("lookups are case-sensitive") {
        REQUIRE_THROWS_AS(store.get("Alice"), UnknownUser);
        store.put(record_for(gen, "Alice"));
        REQUIRE(store.size() == 2);
    }

    SECTION("charset policy applies to stored usernames") {
        REQUIRE_THROWS_AS(store.put(record_for(gen, "a b")), BadUsername);
    }
}

TEST_CASE("save writes the exact documented format") {
    std::mt19937_64 gen(22);
    VerifierStore store("toy17");
    Digest d{};
    d.bytes[0] = 0xab;
    store.put(VerifierRecord{"alice", d});

    const fs::path path = temp_dir() / "exact.authdb";
    store.save(path);

    const std::string expected =
        "# authlab-verifiers v1 curve=toy17\n"
        "alice\tab" + std::string(62, '0') + "\n";
    REQUIRE(slurp(path) == expected);
    REQUIRE_FALSE(fs::exists(path.string() + ".tmp"));   // temp renamed away
    fs::remove(path);
}

TEST_CASE("save/load round-trips arbitrary stores") {
    std::mt19937_64 gen(23);
    const fs::path path = temp_dir() / "roundtrip.authdb";

    for (int iteration = 0; iteration < 100; ++iteration) {
        VerifierStore store(iteration % 2 == 0 ? "toy17" : "p256");
        const std::size_t count = gen() % 12;
        for (std::size_t i = 0; i < count; ++i) {
            const std::string user =
                testsupport::random_identifier(gen) + "_" + std::to_string(i);
            store.put(VerifierRecord{user, testsupport::random_digest(gen)});
        }
        store.save(path);
        const VerifierStore loaded = VerifierStore::load(path);
        REQUIRE(loaded == store);
    }
    fs::remove(path);
}

TEST_CASE("load validates the format strictly") {
    const fs::path dir = temp_dir();

    auto write_file = [&](const std::string& name, const std::string& content) {
        const fs::path p = dir / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    };
    const std::string header = "# authlab-verifiers v1 curve=toy17\n";
    const std::string vpw_hex(64, 'a');

    REQUIRE_THROWS_AS(VerifierStore::load(dir / "no_such_file"), IoFailure);
    REQUIRE_THROWS_AS(VerifierStore::load(write_file("empty", "")), FormatError);
    REQUIRE_THROWS_AS(VerifierStore::load(write_file("hdr", "# wrong header\n")),
                      FormatError);
    REQUIRE_THROWS_AS(
        VerifierStore::load(write_file("odd", header + "alice\t" + vpw_hex + "f\n")),
        FormatError);
    REQUIRE_THROWS_AS(
        VerifierStore::load(write_file("short", header + "alice\t" + "abcd" + "\n")),
        FormatError);
    REQUIRE_THROWS_AS(
        VerifierStore::load(write_file("nothex", header + "alice\t" +
                                                     std::string(64, 'z') + "\n")),
        FormatError);
    REQUIRE_THROWS_AS(
        VerifierStore::load(write_file("notab", header + "alice " + vpw_hex + "\n")),
        FormatError);
    REQUIRE_THROWS_AS(
        VerifierStore::load(write_file(
            "dup", header + "alice\t" + vpw_hex + "\n" + "alice\t" + vpw_hex + "\n")),
        FormatError);
    REQUIRE_THROWS_AS(
        VerifierStore::load(write_file("user", header + "a b\t" + vpw_hex + "\n")),
        FormatError);
    REQUIRE_THROWS_AS(
        VerifierStore::load(write_file("curve", "# authlab-verifiers v1 curve=b@d\nx")),
        FormatError);

    // a valid file loads
    const fs::path good = write_file("good", header + "alice\t" + vpw_hex + "\n");
    REQUIRE(VerifierStore::load(good).curve_name() == "toy17");
    fs::remove_all(dir);
}

TEST_CASE("the store file holds no secret material") {
    const auto& c = p256();
    const ServerKey key(Bytes(32, 0x5c));
    const std::string password = "correct-horse-battery";
    VerifierStore store(c.name);
    store.put(register_user("alice", password, key, c));

    const fs::path path = temp_dir() / "secrets.authdb";
    store.save(path);
    const std::string text = slurp(path);

    REQUIRE(text.find(password) == std::string::npos);
    REQUIRE(text.find(to_hex(key.bytes)) == std::string::npos);
    const Digest hpw = hash_concat("alice", password);
    REQUIRE(text.find(to_hex(hpw.bytes)) == std::string::npos);
    fs::remove(path);
}

TEST_CASE("concurrent puts and gets stay consistent") {
    VerifierStore store("p256");
    std::mt19937_64 gen(24);
    for (int i = 0; i < 8; ++i)
        store.put(VerifierRecord{"user" + std::to_string(i),
                                 testsupport::random_digest(gen)});

    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> threads;
        for (int t = 0; t < 4; ++t) {
            threads.emplace_back([&store, &failed, t] {
                std::mt19937_64 local(100 + t);
                for (int i = 0; i < 500; ++i) {
                    const std::string user = "user" + std::to_string(local() % 8);
                    try {
                        if (store.get(user).username != user)
                            failed = true;
                        store.put(VerifierRecord{user, testsupport::random_digest(local)},
                                  /*overwrite=*/true);
                    } catch (...) {
                        failed = true;
                    }
                }
            });
        }
    }
    REQUIRE_FALSE(failed.load());
    REQUIRE(store.size() == 8);
}
