// Copyright 2026 the manuscriptor authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// File: checkpoint.cpp
// Purpose: checkpoint read/write

#include "manuscript/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "manuscript/error.hpp"

namespace manuscript::ckpt {

namespace {

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

} // namespace

const net::Tensor& Checkpoint::tensor(const std::string& name) const {
    for (const auto& [n, t] : params)
        if (n == name) return t;
    throw validation_error("checkpoint: no parameter named " + name);
}

void save(const Checkpoint& c, const std::filesystem::path& path) {
    nlohmann::json header = c.header;
    nlohmann::json decl = nlohmann::json::array();
    for (const auto& [name, t] : c.params)
        decl.push_back({{"name", name}, {"shape", t.shape}});
    header["params"] = std::move(decl);

    std::string payload(kMagic, 6);
    const std::string header_bytes = header.dump();
    put_u64_le(payload, header_bytes.size());
    payload += header_bytes;
    for (const auto& [name, t] : c.params) {
        (void)name;
        for (double d : t.data) {
            const std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
            put_u64_le(payload, bits);
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot write checkpoint: " + path.string());
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out)
        throw io_error("checkpoint write failed: " + path.string());
}

Checkpoint load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open checkpoint: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 14 || std::memcmp(bytes.data(), kMagic, 6) != 0)
        throw decode_error("not a checkpoint file: " + path.string());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint64_t hlen = get_u64_le(p + 6);
    if (14 + hlen > bytes.size())
        throw decode_error("truncated checkpoint header: " + path.string());

    Checkpoint c;
    try {
        c.header = nlohmann::json::parse(bytes.substr(14, hlen));
    } catch (const nlohmann::json::exception& e) {
        throw decode_error("bad checkpoint header: " + std::string(e.what()));
    }
    if (!c.header.contains("params") || !c.header["params"].is_array())
        throw decode_error("checkpoint header lacks params declaration");

    std::size_t offset = 14 + hlen;
    for (const auto& d : c.header["params"]) {
        const std::string name = d.at("name").get<std::string>();
        const std::vector<std::size_t> shape = d.at("shape").get<std::vector<std::size_t>>();
        net::Tensor t(shape);
        if (offset + 8 * t.size() > bytes.size())
            throw decode_error("truncated checkpoint blob: " + path.string());
        for (std::size_t i = 0; i < t.size(); ++i) {
            t.data[i] = std::bit_cast<double>(get_u64_le(p + offset));
            offset += 8;
        }
        c.params.emplace_back(name, std::move(t));
    }
    if (offset != bytes.size())
        throw decode_error("trailing bytes in checkpoint: " + path.string());
    return c;
}

} // namespace manuscript::ckpt
