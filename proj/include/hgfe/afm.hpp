#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "hgfe/tape.hpp"

namespace hgfe::afm {

/// Learnable parameters of one AFM unit.
struct AfmParams {
    Tensor Wq_low, Wk_low;    // C x d
    Tensor Wq_high, Wk_high;  // C x d
    Tensor a_low, a_high;     // 2d x 1, applied to [q || k]
    Tensor Wv;                // C x C
    Tensor Wf;                // C x C gating MLP
    Tensor bf;                // 1 x C
    double leaky_slope = 0.01;

    static AfmParams init(std::size_t C, std::size_t d, std::uint64_t seed);

    std::size_t channels() const { return Wv.rows(); }
    std::size_t embed_dim() const { return Wq_low.cols(); }

    /// The nine parameter groups by name, for gradient checks and reports.
    std::map<std::string, Tensor> named() const;
    static AfmParams from_named(const std::map<std::string, Tensor>& m, double slope = 0.01);
};

enum class NormMode { PlainSoftmax, SigmoidSoftmax };
enum class OutAct { Sigmoid, Identity };

/// Counts attention work done by AFM passes that share this counter.
struct OpCounter {
    std::uint64_t pairwise = 0;  // (i, j) logit pairs evaluated
    std::uint64_t macs = 0;      // multiply-accumulates (tape-instrumented)
    void reset() { pairwise = 0, macs = 0; }
};

struct AfmConfig {
    NormMode norm = NormMode::PlainSoftmax;
    OutAct act = OutAct::Sigmoid;
    OpCounter* counter = nullptr;
};

/// Parameter leaves of one AFM unit on a tape.
struct AfmVars {
    ad::Var Wq_low, Wk_low, Wq_high, Wk_high, a_low, a_high, Wv, Wf, bf;
    double leaky_slope = 0.01;

    static AfmVars leaves(ad::Tape& tape, const AfmParams& p);
    static AfmVars from_named(const std::map<std::string, ad::Var>& m, const std::string& prefix,
                              double slope);
};

// Stages of the attention unit, each on the tape.
ad::Var channel_summary(ad::Var H);
ad::Var gating_vector(ad::Var s, const AfmVars& p);
ad::Var branch_logits(ad::Var H, ad::Var Wq, ad::Var Wk, ad::Var a, double slope);
/// Per-channel fused attention matrices A_c, each row-stochastic.
std::vector<ad::Var> fuse_and_normalize(ad::Var low, ad::Var high, ad::Var alpha, NormMode mode);
ad::Var aggregate(ad::Var H, const std::vector<ad::Var>& attention, const AfmVars& p, OutAct act);

/// Full AFM pass over an N x C node matrix.
ad::Var afm_forward(ad::Var H, const AfmVars& p, const AfmConfig& cfg = {});

/// Convenience non-tape entry point.
Tensor afm_forward(const Tensor& H, const AfmParams& p, const AfmConfig& cfg = {});

/// Gating vector alpha for a given input, as a plain tensor.
Tensor gating_of(const Tensor& H, const AfmParams& p);

}  // namespace hgfe::afm
