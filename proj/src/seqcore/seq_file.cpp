#include "cdlab/seqcore/seq_file.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

namespace cdl::seqfile {

std::vector<std::uint8_t> pack(const BitSequence& seq) {
    const std::uint64_t n = seq.size();
    std::vector<std::uint8_t> out(kHeaderSize + (n + 7) / 8, 0);
    std::copy(std::begin(kMagic), std::end(kMagic), out.begin());
    for (int k = 0; k < 8; ++k) out[4 + k] = static_cast<std::uint8_t>(n >> (8 * k));
    for (std::uint64_t i = 0; i < n; ++i) {
        if (seq[i]) out[kHeaderSize + i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    return out;
}

BitSequence unpack(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize) throw FormatError("seq file truncated: header incomplete");
    if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
        throw FormatError("seq file has bad magic (expected CDS1)");
    }
    std::uint64_t n = 0;
    for (int k = 0; k < 8; ++k) n |= static_cast<std::uint64_t>(bytes[4 + k]) << (8 * k);
    const std::uint64_t payload = bytes.size() - kHeaderSize;
    if (n > payload * 8) {
        throw FormatError("seq file declares " + std::to_string(n) + " bits but carries only " +
                          std::to_string(payload * 8));
    }
    if ((n + 7) / 8 != payload) {
        throw FormatError("seq file payload size does not match declared length");
    }
    if (n % 8 != 0 && (bytes.back() >> (n % 8)) != 0) {
        throw FormatError("seq file has nonzero padding bits in its last byte");
    }
    std::vector<Bit> bits(n);
    for (std::uint64_t i = 0; i < n; ++i) bits[i] = (bytes[kHeaderSize + i / 8] >> (i % 8)) & 1u;
    return BitSequence(std::move(bits));
}

BitSequence read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return unpack(bytes);
}

void write(const std::filesystem::path& path, const BitSequence& seq) {
    auto bytes = pack(seq);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace cdl::seqfile
