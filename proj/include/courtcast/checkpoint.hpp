#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "courtcast/tensor.hpp"

namespace courtcast {

// Flat binary parameter archive. Layout, all integers little-endian:
//
//   bytes 0..3   magic "CCKP"
//   u32          format version (currently 1)
//   u64          rng seed the parameters were produced with
//   u32          entry count
//   per entry:   u32 name length, name bytes, u32 rank, rank x i64 dims
//   then:        every entry's values as row-major f64, concatenated in
//                entry order
//
// save/load round-trip byte-exactly: doubles are copied bit for bit.
struct Checkpoint {
    std::uint32_t version = 1;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, Tensor>> entries;

    const Tensor* find(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace courtcast
