#include "courtcast/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace courtcast {

namespace {

constexpr char kMagic[4] = {'C', 'C', 'K', 'P'};

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 8);
}

void put_i64(std::ostream& out, std::int64_t v) { put_u64(out, static_cast<std::uint64_t>(v)); }

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw Error("checkpoint " + path + ": truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8))
        throw Error("checkpoint " + path + ": truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

std::int64_t get_i64(std::istream& in, const std::string& path) {
    return static_cast<std::int64_t>(get_u64(in, path));
}

double get_f64(std::istream& in, const std::string& path) {
    return std::bit_cast<double>(get_u64(in, path));
}

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
    for (const auto& [entry_name, tensor] : entries)
        if (entry_name == name) return &tensor;
    return nullptr;
}

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("checkpoint " + path + ": cannot open for writing");

    out.write(kMagic, 4);
    put_u32(out, cp.version);
    put_u64(out, cp.seed);
    put_u32(out, static_cast<std::uint32_t>(cp.entries.size()));
    for (const auto& [name, tensor] : cp.entries) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(out, static_cast<std::uint32_t>(tensor.rank()));
        for (int axis = 0; axis < tensor.rank(); ++axis) put_i64(out, tensor.dim(axis));
    }
    for (const auto& [name, tensor] : cp.entries)
        for (Eigen::Index i = 0; i < tensor.size(); ++i) put_f64(out, tensor.at(i));

    if (!out) throw Error("checkpoint " + path + ": write failed");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("checkpoint " + path + ": cannot open");

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw Error("checkpoint " + path + ": bad magic");

    Checkpoint cp;
    cp.version = get_u32(in, path);
    if (cp.version != 1)
        throw Error("checkpoint " + path + ": unsupported version " +
                    std::to_string(cp.version));
    cp.seed = get_u64(in, path);

    const std::uint32_t count = get_u32(in, path);
    cp.entries.reserve(count);
    for (std::uint32_t e = 0; e < count; ++e) {
        const std::uint32_t name_len = get_u32(in, path);
        std::string name(name_len, '\0');
        if (name_len && !in.read(name.data(), name_len))
            throw Error("checkpoint " + path + ": truncated file");
        const std::uint32_t rank = get_u32(in, path);
        if (rank > 8) throw Error("checkpoint " + path + ": implausible rank");
        std::vector<int> shape(rank);
        for (std::uint32_t axis = 0; axis < rank; ++axis) {
            const std::int64_t d = get_i64(in, path);
            if (d < 0) throw Error("checkpoint " + path + ": negative dimension");
            shape[axis] = static_cast<int>(d);
        }
        cp.entries.emplace_back(std::move(name), Tensor(std::move(shape)));
    }
    for (std::uint32_t e = 0; e < count; ++e) {
        Tensor& tensor = cp.entries[e].second;
        for (Eigen::Index i = 0; i < tensor.size(); ++i) tensor.at(i) = get_f64(in, path);
    }
    if (in.get() != std::ifstream::traits_type::eof())
        throw Error("checkpoint " + path + ": trailing bytes");
    return cp;
}

}  // namespace courtcast
