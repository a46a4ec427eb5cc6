#pragma once

#include "hgfe/supernode.hpp"

namespace hgfe::block {

enum class ResidualMode { FromInput, FromLocal, Off };

struct HgfeConfig {
    afm::NormMode norm = afm::NormMode::PlainSoftmax;
    afm::OutAct act = afm::OutAct::Sigmoid;
    ResidualMode residual = ResidualMode::FromInput;
    afm::OpCounter* intra_counter = nullptr;
    afm::OpCounter* inter_counter = nullptr;
};

struct HgfeParams {
    afm::AfmParams intra;
    afm::AfmParams inter;
    supernode::ProjectionParams proj;
    std::size_t w = 8;

    static HgfeParams init(std::size_t C, std::size_t d, std::size_t w, std::uint64_t seed);
    std::size_t channels() const { return intra.channels(); }
    /// All parameter groups, prefixed intra. / inter. / proj.
    std::map<std::string, Tensor> named() const;
};

struct HgfeVars {
    afm::AfmVars intra;
    afm::AfmVars inter;
    supernode::ProjVars proj;
    static HgfeVars leaves(ad::Tape& tape, const HgfeParams& p);
};

/// Full block: residual + inter(intra(F)).
ad::Var hgfe_forward(ad::Var F, const HgfeVars& vars, std::size_t w, const HgfeConfig& cfg = {});
Tensor hgfe_forward(const Tensor& F, const HgfeParams& params, const HgfeConfig& cfg = {});

enum class AfmConvention { SingleShared, TwoInstances };

struct CostReport {
    struct Item {
        std::string name;
        std::uint64_t count;
    };
    std::vector<Item> breakdown;
    std::uint64_t exact_total = 0;
    std::uint64_t approx_formula = 0;  // 4Cd + 3C^2 + C
    std::int64_t delta = 0;
    // leading C^2 coefficient of the exact count over the approximation's (= 3)
    double leading_ratio = 0.0;
    // FLOP terms of the complexity expression, constant 1
    std::uint64_t flop_local_term = 0;
    std::uint64_t flop_global_term = 0;
    std::uint64_t pairwise_full = 0;       // (HW)^2
    std::uint64_t pairwise_supernode = 0;  // (nh nw)^2
    std::uint64_t instrumented_macs = 0;
    std::uint64_t instrumented_pairwise = 0;
};

/// Exact parameter enumeration vs the usual approximate formula.
CostReport param_count(std::size_t C, std::size_t d,
                       AfmConvention convention = AfmConvention::TwoInstances,
                       bool projection_bias = true);

/// Evaluates both complexity terms and, when run_forward is true, instruments
/// an actual forward pass at the given sizes.
CostReport flop_estimate(std::size_t B, std::size_t C, std::size_t H, std::size_t W,
                         std::size_t w, std::size_t d, bool run_forward = false,
                         std::uint64_t seed = 1);

/// Over-smoothing diagnostic: repeated row-stochastic aggregation of the
/// pre-activation window values. Entry [k][c] is the max per-channel spread
/// over all windows after k applications.
std::vector<std::vector<double>> spread_profile(const Tensor& F, const HgfeParams& params,
                                                std::size_t depth, const HgfeConfig& cfg = {});

/// Complete-graph Dirichlet energy per channel of the same iterates.
std::vector<std::vector<double>> dirichlet_profile(const Tensor& F, const HgfeParams& params,
                                                   std::size_t depth, const HgfeConfig& cfg = {});

}  // namespace hgfe::block
