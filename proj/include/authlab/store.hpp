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
 * The server's user account database: username -> VPW, with a persistent
 * text format.
 *
 *   # authlab-verifiers v1 curve=<name>
 *   <username> TAB <hex(vpw)>
 *
 * UTF-8, LF line endings. The file holds usernames and verifiers only —
 * never K_S, passwords, or HPW.
 */

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "authlab/bytes.hpp"
#include "authlab/codec.hpp"
#include "authlab/errors.hpp"
#include "authlab/protocol.hpp"

namespace authlab {

/// Synchronized map of verifier records: safe for concurrent get/put from
/// connection handlers; save/load operate on a consistent snapshot.
class VerifierStore {
public:
    explicit VerifierStore(std::string curve_name) : curve_name_(std::move(curve_name)) {
        if (!valid_identifier(curve_name_))
            throw FormatError("store curve name must match [A-Za-z0-9._-]{1,64}");
    }

    VerifierStore(const VerifierStore& other) : curve_name_(other.curve_name_) {
        std::shared_lock lk(other.mu_);
        records_ = other.records_;
    }
    VerifierStore& operator=(const VerifierStore&) = delete;

    const std::string& curve_name() const { return curve_name_; }

    void put(const VerifierRecord& record, bool overwrite = false) {
        if (!valid_identifier(record.username))
            throw BadUsername("username must match [A-Za-z0-9._-]{1,64}");
        std::unique_lock lk(mu_);
        auto it = records_.find(record.username);
        if (it != records_.end() && !overwrite)
            throw DuplicateUser("user already registered: " + record.username);
        records_[record.username] = record.vpw;
    }

    /// Lookup is case-sensitive: "Alice" and "alice" are distinct users.
    VerifierRecord get(const std::string& username) const {
        std::shared_lock lk(mu_);
        auto it = records_.find(username);
        if (it == records_.end())
            throw UnknownUser("no verifier for user: " + username);
        return VerifierRecord{it->first, it->second};
    }

    bool contains(const std::string& username) const {
        std::shared_lock lk(mu_);
        return records_.count(username) != 0;
    }

    std::size_t size() const {
        std::shared_lock lk(mu_);
        return records_.size();
    }

    std::vector<VerifierRecord> snapshot() const {
        std::shared_lock lk(mu_);
        std::vector<VerifierRecord> out;
        out.reserve(records_.size());
        for (const auto& [user, vpw] : records_)
            out.push_back(VerifierRecord{user, vpw});
        return out;
    }

    friend bool operator==(const VerifierStore& a, const VerifierStore& b) {
        return a.curve_name_ == b.curve_name_ && a.snapshot() == b.snapshot();
    }

    /// Atomic save: write a temp file in the same directory, then rename.
    void save(const std::filesystem::path& path) const {
        const auto records = snapshot();
        std::filesystem::path tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw IoFailure("cannot open for writing: " + tmp.string());
            out << "# authlab-verifiers v1 curve=" << curve_name_ << "\n";
            for (const auto& rec : records)
                out << rec.username << "\t" << to_hex(rec.vpw.bytes) << "\n";
            out.flush();
            if (!out)
                throw IoFailure("write failed: " + tmp.string());
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) {
            std::filesystem::remove(tmp);
            throw IoFailure("rename failed: " + path.string() + ": " + ec.message());
        }
    }

    static VerifierStore load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoFailure("cannot open store file: " + path.string());
        std::string line;
        if (!std::getline(in, line))
            throw FormatError("store file is empty: " + path.string());
        const std::string prefix = "# authlab-verifiers v1 curve=";
        if (line.rfind(prefix, 0) != 0)
            throw FormatError("bad store header: " + line);
        VerifierStore store(line.substr(prefix.size()));
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty())
                throw FormatError("empty record line " + std::to_string(lineno));
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw FormatError("missing TAB on line " + std::to_string(lineno));
            const std::string username = line.substr(0, tab);
            if (!valid_identifier(username))
                throw FormatError("bad username on line " + std::to_string(lineno));
            const Bytes vpw = from_hex_checked(line.substr(tab + 1), lineno);
            if (store.contains(username))
                throw FormatError("duplicate username on line " + std::to_string(lineno));
            Digest d;
            std::copy(vpw.begin(), vpw.end(), d.bytes.begin());
            store.put(VerifierRecord{username, d});
        }
        return store;
    }

private:
    static Bytes from_hex_checked(const std::string& hex, std::size_t lineno) {
        Bytes vpw;
        try {
            vpw = from_hex(hex);
        } catch (const MalformedEncoding& e) {
            throw FormatError(std::string(e.what()) + " on line " + std::to_string(lineno));
        }
        if (vpw.size() != kDigestSize)
            throw FormatError("verifier is not " + std::to_string(kDigestSize) +
                              " bytes on line " + std::to_string(lineno));
        return vpw;
    }

    std::string curve_name_;
    mutable std::shared_mutex mu_;
    std::map<std::string, Digest> records_;
};

} // namespace authlab
