#include "eulerlab/snapshot.hpp"

#include "eulerlab/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace eulerlab {
namespace {

template <typename T>
void put_le(std::vector<unsigned char>& buf, std::size_t offset, T value) {
    using U = std::make_unsigned_t<T>;
    U u = static_cast<U>(value);
    for (std::size_t b = 0; b < sizeof(T); ++b) buf[offset + b] = static_cast<unsigned char>(u >> (8 * b));
}

template <typename T>
T get_le(const unsigned char* p) {
    T u = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) u |= static_cast<T>(p[b]) << (8 * b);
    return u;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const std::vector<ScalarField>& components) {
    if (components.empty()) throw ConfigError("snapshot: no components to write");
    const PeriodicGrid& g = components.front().grid();
    for (const auto& c : components) require_same_grid(g, c.grid(), "snapshot");

    std::vector<unsigned char> buf(32 + 8 * g.size() * components.size(), 0);
    std::memcpy(buf.data(), "EULB", 4);
    put_le<std::uint16_t>(buf, 4, kSnapshotVersion);
    put_le<std::uint16_t>(buf, 6, static_cast<std::uint16_t>(g.dims()));
    put_le<std::uint32_t>(buf, 8, static_cast<std::uint32_t>(g.n_per_axis()));
    put_le<std::uint32_t>(buf, 12, static_cast<std::uint32_t>(components.size()));
    std::size_t offset = 32;
    for (const auto& c : components) {
        for (double v : c.values()) {
            put_le<std::uint64_t>(buf, offset, std::bit_cast<std::uint64_t>(v));
            offset += 8;
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("snapshot: cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("snapshot: write failed for " + path.string());
}

std::vector<ScalarField> read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("snapshot: cannot open " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 32 || std::memcmp(buf.data(), "EULB", 4) != 0) {
        throw ConfigError("snapshot: bad magic in " + path.string());
    }
    const auto version = get_le<std::uint16_t>(buf.data() + 4);
    if (version != kSnapshotVersion) throw ConfigError("snapshot: unsupported version " + std::to_string(version));
    const int dims = get_le<std::uint16_t>(buf.data() + 6);
    const auto n = static_cast<int>(get_le<std::uint32_t>(buf.data() + 8));
    const auto count = get_le<std::uint32_t>(buf.data() + 12);
    const PeriodicGrid g = make_grid(dims, n);
    if (buf.size() != 32 + 8 * g.size() * count) throw ConfigError("snapshot: truncated file " + path.string());

    std::vector<ScalarField> out;
    std::size_t offset = 32;
    for (std::uint32_t c = 0; c < count; ++c) {
        std::vector<double> values(g.size());
        for (auto& v : values) {
            v = std::bit_cast<double>(get_le<std::uint64_t>(buf.data() + offset));
            offset += 8;
        }
        out.emplace_back(g, std::move(values));
    }
    return out;
}

}  // namespace eulerlab
