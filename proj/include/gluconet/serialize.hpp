#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "gluconet/tensor.hpp"

namespace gluconet::nn {

// Checkpoint layout (little-endian):
//   8 bytes magic "GLCNCKPT", u32 version (1), u32 tensor count,
//   then per tensor: u32 name length, name bytes, u32 ndim, u64 dims...,
//   f64 values (numel of them).
inline constexpr char kCheckpointMagic[8] = {'G', 'L', 'C', 'N', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <class V>
void write_pod(std::ostream& os, V v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <class V>
V read_pod(std::istream& is) {
    V v;
    is.read(reinterpret_cast<char*>(&v), sizeof(V));
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

}  // namespace detail

template <class T>
void save_checkpoint(const std::string& path, const ParamStoreT<T>& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    detail::write_pod(os, kCheckpointVersion);
    detail::write_pod(os, static_cast<std::uint32_t>(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& name = params.name(i);
        const auto& t = params.tensor(i);
        detail::write_pod(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        detail::write_pod(os, static_cast<std::uint32_t>(t.shape.size()));
        for (std::size_t d : t.shape) detail::write_pod(os, static_cast<std::uint64_t>(d));
        for (T v : t.values) detail::write_pod(os, static_cast<double>(v));
    }
    if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

/// Loads values into an already-built store; every tensor must match by name
/// and shape.
template <class T>
void load_checkpoint(const std::string& path, ParamStoreT<T>& params) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    if (detail::read_pod<std::uint32_t>(is) != kCheckpointVersion)
        throw std::runtime_error("checkpoint: unsupported version in " + path);
    const auto count = detail::read_pod<std::uint32_t>(is);
    if (count != params.size())
        throw std::runtime_error("checkpoint: tensor count mismatch in " + path);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name_len = detail::read_pod<std::uint32_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        auto* t = params.find(name);
        if (!t) throw std::runtime_error("checkpoint: unknown tensor '" + name + "'");
        const auto ndim = detail::read_pod<std::uint32_t>(is);
        std::vector<std::size_t> shape(ndim);
        for (auto& d : shape) d = static_cast<std::size_t>(detail::read_pod<std::uint64_t>(is));
        if (shape != t->shape) throw std::runtime_error("checkpoint: shape mismatch for '" + name + "'");
        for (auto& v : t->values) v = static_cast<T>(detail::read_pod<double>(is));
    }
}

}  // namespace gluconet::nn
