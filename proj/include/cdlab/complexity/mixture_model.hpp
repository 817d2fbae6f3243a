#pragma once

#include <cstdint>
#include <vector>

#include "cdlab/seqcore/bit_sequence.hpp"

namespace cdl {

struct MixtureConfig {
    // Period-position models use context (position mod p) for p = 1..max_period.
    unsigned max_period = 12;
    // Order-k models use the previous k bits as context.
    std::vector<unsigned> orders{1, 2, 4, 8};
    // Partition tree depth; one tree covers 2^depth symbols of a context.
    unsigned depth = 17;
};

// Sequential bit predictor: a Bayesian mixture of context models, each
// context running a Partition Tree Weighting estimator over a base measure
// of (1/2) KT + (1/4) [all zeros] + (1/4) [all ones]. The base handles the
// constant stretches produced by dilution, the partition tree handles
// piecewise-stationary data such as oscillating generators.
//
// Plain value type: copying a model snapshots it, which is how priming on a
// context is reused across candidate encodings.
class MixtureModel {
public:
    explicit MixtureModel(const MixtureConfig& config = {});

    // P(next bit = 1). Must be followed by update() before the next predict().
    double predict();
    std::uint32_t predict16();
    void update(Bit bit);
    void feed(Bit bit) {
        predict();
        update(bit);
    }
    void prime(BitView bits) {
        for (Bit b : bits) feed(b);
    }
    std::uint64_t position() const { return position_; }

private:
    struct Level {
        std::uint32_t n0 = 0, n1 = 0;
        double lkt = 0.0;   // log KT probability of the open segment
        double w = 0.0;     // log PTW probability of the open segment
        double left = 0.0;  // log PTW of the completed left half, 0 if none
    };
    struct Scratch {
        double lkt, w;
    };

    std::size_t context_of(std::size_t model) const;
    Level* tree(std::size_t model, std::size_t ctx);
    void prepare(Level* lv, std::uint64_t& t);
    // Per-level state after appending a one and after appending a zero.
    void hypotheses(const Level* lv, Scratch* one, Scratch* zero) const;
    void commit(Level* lv, std::uint64_t& t, Bit bit, const Scratch* s);

    MixtureConfig config_;
    unsigned levels_;
    std::vector<unsigned> periods_;
    std::vector<std::size_t> offsets_;      // first tree of each model
    std::vector<Level> levels_store_;       // trees laid out back to back
    std::vector<std::uint64_t> counts_;     // symbols seen per tree
    std::vector<double> log_weight_;        // mixture posterior, log scale
    std::vector<double> p1_;                // per-model predictions
    std::vector<Scratch> scratch1_;         // hypothesis bit = 1, per model
    std::vector<Scratch> scratch0_;
    std::vector<std::size_t> active_;       // tree index per model at this step
    std::uint64_t position_ = 0;
    std::uint64_t history_ = 0;
    bool predicted_ = false;
};

}  // namespace cdl
