#include "cdlab/complexity/lz78.hpp"

#include <algorithm>

#include "cdlab/complexity/elias.hpp"

namespace cdl {

Lz78Coder::Lz78Coder() : children_(2, 0), parent_(1, 0), last_bit_(1, 0) {}

std::size_t Lz78Coder::add(std::size_t parent, Bit b) {
    const std::size_t id = parent_.size();
    children_[2 * parent + b] = id;
    children_.push_back(0);
    children_.push_back(0);
    parent_.push_back(parent);
    last_bit_.push_back(b);
    return id;
}

void Lz78Coder::prime(BitView bits) {
    std::size_t node = 0;
    for (Bit b : bits) {
        const std::size_t next = child(node, b);
        if (next != 0) {
            node = next;
        } else {
            add(node, b);
            node = 0;
        }
    }
}

std::vector<Bit> Lz78Coder::encode(BitView w) const {
    Lz78Coder dict = *this;
    BitWriter out;
    std::size_t node = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Bit b = w[i];
        const std::size_t next = dict.child(node, b);
        if (next != 0) {
            node = next;
            continue;
        }
        out.put_uint(node, elias::ceil_log2(dict.parent_.size()));
        out.put(b);
        dict.add(node, b);
        node = 0;
    }
    if (node != 0) out.put_uint(node, elias::ceil_log2(dict.parent_.size()));
    return out.take();
}

std::size_t Lz78Coder::encoded_length(BitView w) const { return encode(w).size(); }

std::vector<std::size_t> Lz78Coder::prefix_lengths(BitView w, const std::vector<std::uint64_t>& lengths) const {
    Lz78Coder dict = *this;
    std::vector<std::size_t> out;
    std::size_t emitted = 0;
    std::size_t node = 0;
    auto pending = [&] { return node != 0 ? elias::ceil_log2(dict.parent_.size()) : 0u; };
    std::size_t next = 0;
    while (next < lengths.size() && lengths[next] == 0) {
        out.push_back(0);
        ++next;
    }
    for (std::size_t i = 0; i < w.size() && next < lengths.size(); ++i) {
        const Bit b = w[i];
        const std::size_t child = dict.child(node, b);
        if (child != 0) {
            node = child;
        } else {
            emitted += elias::ceil_log2(dict.parent_.size()) + 1;
            dict.add(node, b);
            node = 0;
        }
        while (next < lengths.size() && lengths[next] == i + 1) {
            out.push_back(emitted + pending());
            ++next;
        }
    }
    return out;
}

std::optional<BitSequence> Lz78Coder::decode(const Source& source, std::size_t length) const {
    Lz78Coder dict = *this;
    BitSequence out;
    std::vector<Bit> phrase;
    while (out.size() < length) {
        const unsigned width = elias::ceil_log2(dict.parent_.size());
        std::size_t node = 0;
        for (unsigned k = 0; k < width; ++k) {
            auto b = source();
            if (!b) return std::nullopt;
            node = (node << 1) | *b;
        }
        if (node >= dict.parent_.size()) return std::nullopt;
        phrase.clear();
        for (std::size_t v = node; v != 0; v = dict.parent_[v]) phrase.push_back(dict.last_bit_[v]);
        std::reverse(phrase.begin(), phrase.end());
        if (out.size() + phrase.size() > length) return std::nullopt;
        out.append(phrase);
        if (out.size() == length) {
            // The encoder writes a bare index only for a non-empty final phrase.
            if (node == 0) return std::nullopt;
            break;
        }
        auto b = source();
        if (!b) return std::nullopt;
        // A fresh bit extending to an existing phrase would never be emitted.
        if (dict.child(node, *b) != 0) return std::nullopt;
        out.push_back(*b);
        dict.add(node, *b);
    }
    return out;
}

}  // namespace cdl
