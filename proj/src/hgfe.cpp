#include "hgfe/hgfe.hpp"

#include <algorithm>
#include <cmath>

#include "hgfe/spectral.hpp"

namespace hgfe::block {

HgfeParams HgfeParams::init(std::size_t C, std::size_t d, std::size_t w, std::uint64_t seed) {
    HgfeParams p;
    p.intra = afm::AfmParams::init(C, d, seed);
    p.inter = afm::AfmParams::init(C, d, seed + 1000);
    p.proj = supernode::ProjectionParams::init(C, seed + 2000);
    p.w = w;
    return p;
}

std::map<std::string, Tensor> HgfeParams::named() const {
    std::map<std::string, Tensor> out;
    for (const auto& [k, v] : intra.named()) out["intra." + k] = v;
    for (const auto& [k, v] : inter.named()) out["inter." + k] = v;
    for (const auto& [k, v] : proj.named()) out["proj." + k] = v;
    return out;
}

HgfeVars HgfeVars::leaves(ad::Tape& tape, const HgfeParams& p) {
    HgfeVars v;
    v.intra = afm::AfmVars::leaves(tape, p.intra);
    v.inter = afm::AfmVars::leaves(tape, p.inter);
    v.proj = supernode::ProjVars::leaves(tape, p.proj);
    return v;
}

ad::Var hgfe_forward(ad::Var F, const HgfeVars& vars, std::size_t w, const HgfeConfig& cfg) {
    afm::AfmConfig intra_cfg{cfg.norm, cfg.act, cfg.intra_counter};
    afm::AfmConfig inter_cfg{cfg.norm, cfg.act, cfg.inter_counter};
    ad::Var local = window::intra_window_forward(F, vars.intra, w, intra_cfg);
    ad::Var global = supernode::inter_window_forward(local, vars.inter, vars.proj, w, inter_cfg);
    switch (cfg.residual) {
        case ResidualMode::FromInput: return ad::add(F, global);
        case ResidualMode::FromLocal: return ad::add(local, global);
        case ResidualMode::Off: return global;
    }
    throw ContractError("unknown residual mode");
}

Tensor hgfe_forward(const Tensor& F, const HgfeParams& params, const HgfeConfig& cfg) {
    ad::Tape tape;
    ad::Var f = tape.leaf(F);
    HgfeVars vars = HgfeVars::leaves(tape, params);
    return hgfe_forward(f, vars, params.w, cfg).val();
}

CostReport param_count(std::size_t C, std::size_t d, AfmConvention convention,
                       bool projection_bias) {
    if (C < 1 || d < 1) throw ContractError("param_count: C and d must be >= 1");
    CostReport r;
    std::uint64_t instances = convention == AfmConvention::TwoInstances ? 2 : 1;
    auto push = [&r](const std::string& name, std::uint64_t count) {
        r.breakdown.push_back({name, count});
        r.exact_total += count;
    };
    for (std::uint64_t i = 0; i < instances; ++i) {
        std::string tag = instances == 1 ? "afm." : (i == 0 ? "intra." : "inter.");
        push(tag + "WQ_WK_low_high", 4 * C * d);
        push(tag + "attention_vectors", 4 * d);
        push(tag + "Wv", C * C);
        push(tag + "Wf", C * C);
        push(tag + "bf", C);
    }
    push("proj.Wproj", 2 * C * C);
    if (projection_bias) push("proj.bproj", C);
    r.approx_formula = 4 * C * d + 3 * C * C + C;
    r.delta = static_cast<std::int64_t>(r.exact_total) - static_cast<std::int64_t>(r.approx_formula);
    // C^2-scaling groups: Wv + Wf per instance, plus the 2C^2 projection
    r.leading_ratio = static_cast<double>(2 * instances + 2) / 3.0;
    return r;
}

CostReport flop_estimate(std::size_t B, std::size_t C, std::size_t H, std::size_t W,
                         std::size_t w, std::size_t d, bool run_forward, std::uint64_t seed) {
    if (H % w != 0)
        throw PartitionError("H=" + std::to_string(H) + " is not divisible by w=" + std::to_string(w));
    if (W % w != 0)
        throw PartitionError("W=" + std::to_string(W) + " is not divisible by w=" + std::to_string(w));
    std::size_t nh = H / w, nw = W / w, M = nh * nw;
    CostReport r;
    r.flop_local_term = static_cast<std::uint64_t>(B) * M * w * w * (d + C + C * C);
    r.flop_global_term = static_cast<std::uint64_t>(B) * M * M * d;
    r.pairwise_full = static_cast<std::uint64_t>(H) * W * H * W;
    r.pairwise_supernode = static_cast<std::uint64_t>(M) * M;
    if (run_forward) {
        HgfeParams params = HgfeParams::init(C, d, w, seed);
        Tensor F = init_range(seed + 7, {B, C, H, W}, -1.0, 1.0);
        afm::OpCounter intra_counter, inter_counter;
        HgfeConfig cfg;
        cfg.intra_counter = &intra_counter;
        cfg.inter_counter = &inter_counter;
        hgfe_forward(F, params, cfg);
        r.instrumented_macs = intra_counter.macs + inter_counter.macs;
        r.instrumented_pairwise = inter_counter.pairwise;
    }
    return r;
}

namespace {

// Row-stochastic attention matrices of one AFM pass, as plain tensors.
std::vector<Tensor> attention_of(const Tensor& H, const afm::AfmParams& p, afm::NormMode norm) {
    ad::Tape tape;
    ad::Var h = tape.leaf(H);
    afm::AfmVars vars = afm::AfmVars::leaves(tape, p);
    ad::Var s = afm::channel_summary(h);
    ad::Var alpha = afm::gating_vector(s, vars);
    ad::Var low = afm::branch_logits(h, vars.Wq_low, vars.Wk_low, vars.a_low, vars.leaky_slope);
    ad::Var high = afm::branch_logits(h, vars.Wq_high, vars.Wk_high, vars.a_high, vars.leaky_slope);
    std::vector<ad::Var> att = afm::fuse_and_normalize(low, high, alpha, norm);
    std::vector<Tensor> out;
    out.reserve(att.size());
    for (ad::Var a : att) out.push_back(a.val());
    return out;
}

Tensor matmul_plain(const Tensor& A, const Tensor& B) {
    Tensor out({A.rows(), B.cols()});
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t p = 0; p < A.cols(); ++p)
            for (std::size_t j = 0; j < B.cols(); ++j) out.at(i, j) += A.at(i, p) * B.at(p, j);
    return out;
}

// Iterates of the stacked intra-window aggregation per window:
// X_0 = H Wv, X_{t+1}[:,c] = A_c(X_t) X_t[:,c].
std::vector<std::vector<Tensor>> aggregation_iterates(const Tensor& F, const HgfeParams& params,
                                                      std::size_t depth, const HgfeConfig& cfg) {
    if (cfg.act != afm::OutAct::Identity)
        throw ContractError("spread diagnostics require the identity output activation");
    window::WindowGrid g = window::make_grid(F, params.w);
    std::vector<Tensor> windows = window::partition_windows(F, g);
    std::vector<std::vector<Tensor>> iterates(depth + 1);
    for (const Tensor& P : windows) {
        Tensor X = matmul_plain(window::window_to_nodes(P), params.intra.Wv);
        iterates[0].push_back(X);
        for (std::size_t t = 1; t <= depth; ++t) {
            std::vector<Tensor> att = attention_of(X, params.intra, cfg.norm);
            Tensor next(X.shape());
            for (std::size_t c = 0; c < X.cols(); ++c) {
                for (std::size_t i = 0; i < X.rows(); ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < X.rows(); ++j)
                        acc += att[c].at(i, j) * X.at(j, c);
                    next.at(i, c) = acc;
                }
            }
            X = std::move(next);
            iterates[t].push_back(X);
        }
    }
    return iterates;
}

}  // namespace

std::vector<std::vector<double>> spread_profile(const Tensor& F, const HgfeParams& params,
                                                std::size_t depth, const HgfeConfig& cfg) {
    auto iterates = aggregation_iterates(F, params, depth, cfg);
    std::size_t C = params.channels();
    std::vector<std::vector<double>> profile(depth + 1, std::vector<double>(C, 0.0));
    for (std::size_t t = 0; t <= depth; ++t)
        for (const Tensor& X : iterates[t])
            for (std::size_t c = 0; c < C; ++c) {
                double lo = X.at(0, c), hi = X.at(0, c);
                for (std::size_t i = 1; i < X.rows(); ++i) {
                    lo = std::min(lo, X.at(i, c));
                    hi = std::max(hi, X.at(i, c));
                }
                profile[t][c] = std::max(profile[t][c], hi - lo);
            }
    return profile;
}

std::vector<std::vector<double>> dirichlet_profile(const Tensor& F, const HgfeParams& params,
                                                   std::size_t depth, const HgfeConfig& cfg) {
    auto iterates = aggregation_iterates(F, params, depth, cfg);
    std::size_t C = params.channels();
    std::size_t N = params.w * params.w;
    auto lap = spectral::normalized_laplacian(spectral::GraphAdjacency::complete(N));
    std::vector<std::vector<double>> profile(depth + 1, std::vector<double>(C, 0.0));
    for (std::size_t t = 0; t <= depth; ++t)
        for (const Tensor& X : iterates[t])
            for (std::size_t c = 0; c < C; ++c) {
                std::vector<double> x(N);
                for (std::size_t i = 0; i < N; ++i) x[i] = X.at(i, c);
                profile[t][c] += spectral::dirichlet_energy(lap, x);
            }
    return profile;
}

}  // namespace hgfe::block
