#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mhft/errors.hpp"
#include "mhft/neural.hpp"

namespace mhft {

inline constexpr char kCheckpointMagic[8] = {'M', 'H', 'F', 'T', 'C', 'K', 'P', 'T'};
inline constexpr int kCheckpointVersion = 1;

// Layout: 8-byte magic, u64 little-endian manifest length, JSON manifest,
// then each registered parameter as little-endian 32-bit floats in registry
// order. The manifest always records version, names and shapes; callers add
// seed, config hash and normalizer statistics.
inline void save_checkpoint(const std::string& path,
                            const std::vector<Parameter*>& params,
                            nlohmann::json manifest) {
    manifest["version"] = kCheckpointVersion;
    nlohmann::json shapes = nlohmann::json::array();
    for (const Parameter* p : params)
        shapes.push_back({{"name", p->name}, {"rows", p->value.rows}, {"cols", p->value.cols}});
    manifest["parameters"] = shapes;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    const std::string body = manifest.dump();
    const std::uint64_t len = body.size();
    char lenbuf[8];
    for (int i = 0; i < 8; ++i) lenbuf[i] = static_cast<char>((len >> (8 * i)) & 0xff);
    out.write(lenbuf, 8);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));

    std::vector<float> buf;
    for (const Parameter* p : params) {
        buf.resize(p->value.size());
        for (std::size_t i = 0; i < buf.size(); ++i)
            buf[i] = static_cast<float>(p->value.data[i]);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
}

struct LoadedCheckpoint {
    nlohmann::json manifest;
    std::vector<Matrix> arrays;  // same order as the manifest's parameter list
};

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, 8);
    if (in.gcount() != 8 || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw CheckpointCorrupt("bad magic in " + path);
    char lenbuf[8];
    in.read(lenbuf, 8);
    if (in.gcount() != 8) throw CheckpointCorrupt("truncated manifest length in " + path);
    std::uint64_t len = 0;
    for (int i = 0; i < 8; ++i)
        len |= static_cast<std::uint64_t>(static_cast<unsigned char>(lenbuf[i])) << (8 * i);
    std::string body(len, '\0');
    in.read(body.data(), static_cast<std::streamsize>(len));
    if (static_cast<std::uint64_t>(in.gcount()) != len)
        throw CheckpointCorrupt("truncated manifest in " + path);

    LoadedCheckpoint ck;
    ck.manifest = nlohmann::json::parse(body, nullptr, false);
    if (ck.manifest.is_discarded() || !ck.manifest.contains("version"))
        throw CheckpointCorrupt("manifest missing version in " + path);
    if (ck.manifest["version"].get<int>() != kCheckpointVersion)
        throw CheckpointCorrupt("unsupported checkpoint version in " + path);

    for (const auto& entry : ck.manifest["parameters"]) {
        const auto rows = entry["rows"].get<std::size_t>();
        const auto cols = entry["cols"].get<std::size_t>();
        Matrix m(rows, cols);
        std::vector<float> buf(rows * cols);
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (static_cast<std::size_t>(in.gcount()) != buf.size() * sizeof(float))
            throw CheckpointCorrupt("truncated parameter data in " + path);
        for (std::size_t i = 0; i < buf.size(); ++i) m.data[i] = static_cast<double>(buf[i]);
        ck.arrays.push_back(std::move(m));
    }
    return ck;
}

// Restores values into a live registry; names and shapes must match exactly.
inline nlohmann::json load_checkpoint_into(const std::string& path,
                                           const std::vector<Parameter*>& params) {
    LoadedCheckpoint ck = load_checkpoint(path);
    if (ck.arrays.size() != params.size())
        throw CheckpointCorrupt("parameter count mismatch loading " + path);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& entry = ck.manifest["parameters"][i];
        if (entry["name"].get<std::string>() != params[i]->name)
            throw CheckpointCorrupt("parameter name mismatch at index " + std::to_string(i) +
                                    ": expected " + params[i]->name);
        if (!ck.arrays[i].same_shape(params[i]->value))
            throw CheckpointCorrupt("parameter shape mismatch for " + params[i]->name);
        params[i]->value = ck.arrays[i];
        params[i]->zero_grad();
    }
    return ck.manifest;
}

}  // namespace mhft
