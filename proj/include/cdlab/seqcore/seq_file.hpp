#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "cdlab/seqcore/bit_sequence.hpp"

namespace cdl::seqfile {

// .seq layout:
//   bytes 0..3   magic "CDS1"
//   bytes 4..11  bit length, unsigned 64-bit little-endian
//   then ceil(length/8) payload bytes; bit j of byte k is S[8k + j]
//   (least significant bit first), unused high bits of the last byte are 0.
inline constexpr char kMagic[4] = {'C', 'D', 'S', '1'};
inline constexpr std::size_t kHeaderSize = 12;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> pack(const BitSequence& seq);
BitSequence unpack(std::span<const std::uint8_t> bytes);

BitSequence read(const std::filesystem::path& path);
// Atomic: writes a temporary sibling, then renames over the target.
void write(const std::filesystem::path& path, const BitSequence& seq);

}  // namespace cdl::seqfile
