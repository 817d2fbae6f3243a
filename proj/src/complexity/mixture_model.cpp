#include "cdlab/complexity/mixture_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cdlab/complexity/arithmetic_coder.hpp"

namespace cdl {

namespace {

const double kLogHalf = std::log(0.5);
const double kLogQuarter = std::log(0.25);

// log(e^a + e^b) via a linearly interpolated table of log1p(e^-d). The
// approximation only perturbs the model's probabilities; encoder and decoder
// evaluate the same function, so coding stays exact.
struct LogAddTable {
    static constexpr double kRange = 40.0;
    static constexpr double kScale = 64.0;
    std::vector<double> v;
    LogAddTable() : v(static_cast<std::size_t>(kRange * kScale) + 2) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::log1p(std::exp(-static_cast<double>(i) / kScale));
    }
};
const LogAddTable kLogAdd;

inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    const double d = (a - b) * LogAddTable::kScale;
    if (!(d < LogAddTable::kRange * LogAddTable::kScale)) return a;
    const auto i = static_cast<std::size_t>(d);
    const double f = d - static_cast<double>(i);
    return a + kLogAdd.v[i] + f * (kLogAdd.v[i + 1] - kLogAdd.v[i]);
}

// log(k + 1/2) and log(k + 1) for the KT estimator.
struct KtTables {
    std::vector<double> half, one;
    explicit KtTables(std::size_t n) : half(n), one(n) {
        for (std::size_t k = 0; k < n; ++k) {
            half[k] = std::log(static_cast<double>(k) + 0.5);
            one[k] = std::log(static_cast<double>(k) + 1.0);
        }
    }
};

const KtTables& kt_tables(unsigned depth) {
    static const KtTables tables((std::size_t{1} << 20) + 2);
    if (depth > 20) throw std::invalid_argument("mixture depth above 20 is not supported");
    return tables;
}

}  // namespace

MixtureModel::MixtureModel(const MixtureConfig& config) : config_(config), levels_(config.depth + 1) {
    kt_tables(config_.depth);
    std::size_t trees = 0;
    for (unsigned p = 1; p <= config_.max_period; ++p) {
        periods_.push_back(p);
        offsets_.push_back(trees);
        trees += p;
    }
    for (unsigned k : config_.orders) {
        if (k == 0 || k > 16) throw std::invalid_argument("context orders must be in 1..16");
        offsets_.push_back(trees);
        trees += std::size_t{1} << k;
    }
    const std::size_t models = offsets_.size();
    if (models == 0) throw std::invalid_argument("mixture needs at least one model");
    levels_store_.assign(trees * levels_, Level{});
    counts_.assign(trees, 0);
    log_weight_.assign(models, -std::log(static_cast<double>(models)));
    p1_.assign(models, 0.5);
    scratch1_.assign(models * levels_, Scratch{});
    scratch0_.assign(models * levels_, Scratch{});
    active_.assign(models, 0);
}

std::size_t MixtureModel::context_of(std::size_t model) const {
    if (model < periods_.size()) return static_cast<std::size_t>(position_ % periods_[model]);
    const unsigned k = config_.orders[model - periods_.size()];
    return static_cast<std::size_t>(history_ & ((std::uint64_t{1} << k) - 1));
}

MixtureModel::Level* MixtureModel::tree(std::size_t model, std::size_t ctx) {
    return &levels_store_[(offsets_[model] + ctx) * levels_];
}

// Opens a new segment at every level whose segment boundary falls at t: the
// levels up to the number of trailing zeros of t restart, and the level just
// above them moves into its right half, remembering the finished left half.
void MixtureModel::prepare(Level* lv, std::uint64_t& t) {
    const unsigned D = config_.depth;
    const std::uint64_t local = t & ((std::uint64_t{1} << D) - 1);
    const unsigned tz = local == 0 ? D : static_cast<unsigned>(std::countr_zero(local));
    if (tz < D) lv[tz + 1].left = lv[tz].w;
    for (unsigned j = 0; j <= tz; ++j) lv[j] = Level{};
}

void MixtureModel::hypotheses(const Level* lv, Scratch* one, Scratch* zero) const {
    const auto& kt = kt_tables(config_.depth);
    double below1 = 0.0, below0 = 0.0;
    for (unsigned j = 0; j < levels_; ++j) {
        const Level& L = lv[j];
        const double norm = L.lkt - kt.one[L.n0 + L.n1];
        const double kt1 = norm + kt.half[L.n1];
        const double kt0 = norm + kt.half[L.n0];
        double rho1 = kLogHalf + kt1;
        double rho0 = kLogHalf + kt0;
        if (L.n0 == 0) rho1 = log_add(rho1, kLogQuarter);
        if (L.n1 == 0) rho0 = log_add(rho0, kLogQuarter);
        double w1 = rho1, w0 = rho0;
        if (j > 0) {
            w1 = log_add(kLogHalf + rho1, kLogHalf + L.left + below1);
            w0 = log_add(kLogHalf + rho0, kLogHalf + L.left + below0);
        }
        one[j] = Scratch{kt1, w1};
        zero[j] = Scratch{kt0, w0};
        below1 = w1;
        below0 = w0;
    }
}

void MixtureModel::commit(Level* lv, std::uint64_t& t, Bit bit, const Scratch* s) {
    for (unsigned j = 0; j < levels_; ++j) {
        Level& L = lv[j];
        if (bit) {
            ++L.n1;
        } else {
            ++L.n0;
        }
        L.lkt = s[j].lkt;
        L.w = s[j].w;
    }
    ++t;
}

double MixtureModel::predict() {
    const std::size_t models = offsets_.size();
    double max_lw = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < models; ++m) max_lw = std::max(max_lw, log_weight_[m]);
    double num = 0.0, den = 0.0;
    const unsigned top = levels_ - 1;
    for (std::size_t m = 0; m < models; ++m) {
        const std::size_t idx = offsets_[m] + context_of(m);
        active_[m] = idx;
        Level* lv = &levels_store_[idx * levels_];
        prepare(lv, counts_[idx]);
        Scratch* s1 = &scratch1_[m * levels_];
        Scratch* s0 = &scratch0_[m * levels_];
        hypotheses(lv, s1, s0);
        // The two continuations sum to the current probability up to rounding;
        // normalizing keeps the prediction a proper distribution.
        double p = 1.0 / (1.0 + std::exp(s0[top].w - s1[top].w));
        p = std::clamp(p, 1e-15, 1.0 - 1e-15);
        p1_[m] = p;
        const double weight = std::exp(log_weight_[m] - max_lw);
        num += weight * p;
        den += weight;
    }
    predicted_ = true;
    return num / den;
}

std::uint32_t MixtureModel::predict16() { return quantize_probability(predict()); }

void MixtureModel::update(Bit bit) {
    if (!predicted_) predict();
    const std::size_t models = offsets_.size();
    double max_lw = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < models; ++m) {
        const std::size_t idx = active_[m];
        Level* lv = &levels_store_[idx * levels_];
        const Scratch* s = bit ? &scratch1_[m * levels_] : &scratch0_[m * levels_];
        commit(lv, counts_[idx], bit, s);
        log_weight_[m] += std::log(bit ? p1_[m] : 1.0 - p1_[m]);
        max_lw = std::max(max_lw, log_weight_[m]);
    }
    for (auto& lw : log_weight_) lw -= max_lw;
    history_ = (history_ << 1) | (bit ? 1u : 0u);
    ++position_;
    predicted_ = false;
}

}  // namespace cdl
