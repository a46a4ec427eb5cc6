#include "hgfe/afm.hpp"

namespace hgfe::afm {

AfmParams AfmParams::init(std::size_t C, std::size_t d, std::uint64_t seed) {
    if (C < 1 || d < 1) throw ContractError("AfmParams: C and d must be >= 1");
    AfmParams p;
    p.Wq_low = init_uniform(seed + 1, {C, d}, C);
    p.Wk_low = init_uniform(seed + 2, {C, d}, C);
    p.Wq_high = init_uniform(seed + 3, {C, d}, C);
    p.Wk_high = init_uniform(seed + 4, {C, d}, C);
    p.a_low = init_uniform(seed + 5, {2 * d, 1}, 2 * d);
    p.a_high = init_uniform(seed + 6, {2 * d, 1}, 2 * d);
    p.Wv = init_uniform(seed + 7, {C, C}, C);
    p.Wf = init_uniform(seed + 8, {C, C}, C);
    p.bf = init_uniform(seed + 9, {1, C}, C);
    return p;
}

std::map<std::string, Tensor> AfmParams::named() const {
    return {{"Wq_low", Wq_low}, {"Wk_low", Wk_low}, {"Wq_high", Wq_high},
            {"Wk_high", Wk_high}, {"a_low", a_low}, {"a_high", a_high},
            {"Wv", Wv},           {"Wf", Wf},       {"bf", bf}};
}

AfmParams AfmParams::from_named(const std::map<std::string, Tensor>& m, double slope) {
    AfmParams p;
    p.Wq_low = m.at("Wq_low");
    p.Wk_low = m.at("Wk_low");
    p.Wq_high = m.at("Wq_high");
    p.Wk_high = m.at("Wk_high");
    p.a_low = m.at("a_low");
    p.a_high = m.at("a_high");
    p.Wv = m.at("Wv");
    p.Wf = m.at("Wf");
    p.bf = m.at("bf");
    p.leaky_slope = slope;
    return p;
}

AfmVars AfmVars::leaves(ad::Tape& tape, const AfmParams& p) {
    AfmVars v;
    v.Wq_low = tape.leaf(p.Wq_low);
    v.Wk_low = tape.leaf(p.Wk_low);
    v.Wq_high = tape.leaf(p.Wq_high);
    v.Wk_high = tape.leaf(p.Wk_high);
    v.a_low = tape.leaf(p.a_low);
    v.a_high = tape.leaf(p.a_high);
    v.Wv = tape.leaf(p.Wv);
    v.Wf = tape.leaf(p.Wf);
    v.bf = tape.leaf(p.bf);
    v.leaky_slope = p.leaky_slope;
    return v;
}

AfmVars AfmVars::from_named(const std::map<std::string, ad::Var>& m, const std::string& prefix,
                            double slope) {
    AfmVars v;
    v.Wq_low = m.at(prefix + "Wq_low");
    v.Wk_low = m.at(prefix + "Wk_low");
    v.Wq_high = m.at(prefix + "Wq_high");
    v.Wk_high = m.at(prefix + "Wk_high");
    v.a_low = m.at(prefix + "a_low");
    v.a_high = m.at(prefix + "a_high");
    v.Wv = m.at(prefix + "Wv");
    v.Wf = m.at(prefix + "Wf");
    v.bf = m.at(prefix + "bf");
    v.leaky_slope = slope;
    return v;
}

ad::Var channel_summary(ad::Var H) { return ad::mean_rows(H); }

ad::Var gating_vector(ad::Var s, const AfmVars& p) {
    // alpha = sigmoid(Wf s + bf), computed in row form
    return ad::sigmoid(ad::add(ad::matmul(s, ad::transpose(p.Wf)), p.bf));
}

ad::Var branch_logits(ad::Var H, ad::Var Wq, ad::Var Wk, ad::Var a, double slope) {
    std::size_t d = Wq.val().cols();
    if (a.val().rows() != 2 * d || a.val().cols() != 1)
        throw ShapeError("branch_logits: attention vector must be 2d x 1");
    ad::Var q = ad::matmul(H, Wq);
    ad::Var k = ad::matmul(H, Wk);
    // [q_i || k_j]^T a splits into q_i . a[0:d] + k_j . a[d:2d]
    ad::Var u = ad::matmul(q, ad::slice_rows(a, 0, d));
    ad::Var v = ad::matmul(k, ad::slice_rows(a, d, d));
    return ad::leaky_relu(ad::outer_sum(u, v), slope);
}

std::vector<ad::Var> fuse_and_normalize(ad::Var low, ad::Var high, ad::Var alpha, NormMode mode) {
    std::size_t C = alpha.val().cols();
    std::vector<ad::Var> attention;
    attention.reserve(C);
    for (std::size_t c = 0; c < C; ++c) {
        ad::Var fused = ad::gate_mix(low, high, alpha, c);
        if (mode == NormMode::SigmoidSoftmax) fused = ad::sigmoid(fused);
        attention.push_back(ad::softmax_rows(fused));
    }
    return attention;
}

ad::Var aggregate(ad::Var H, const std::vector<ad::Var>& attention, const AfmVars& p, OutAct act) {
    ad::Var V = ad::matmul(H, p.Wv);
    std::size_t C = V.val().cols();
    if (attention.size() != C) throw ContractError("aggregate: need one attention matrix per channel");
    std::vector<ad::Var> cols;
    cols.reserve(C);
    for (std::size_t c = 0; c < C; ++c) cols.push_back(ad::matmul(attention[c], ad::column(V, c)));
    ad::Var out = ad::hstack(cols);
    return act == OutAct::Sigmoid ? ad::sigmoid(out) : out;
}

ad::Var afm_forward(ad::Var H, const AfmVars& p, const AfmConfig& cfg) {
    if (H.val().rank() != 2 || H.val().rows() < 1)
        throw ShapeError("afm_forward: H must be N x C with N >= 1");
    // tape node storage may reallocate as ops are added, so take sizes by value
    std::uint64_t n_nodes = H.val().rows();
    std::uint64_t mac_before = H.tape->mac_count;
    ad::Var s = channel_summary(H);
    ad::Var alpha = gating_vector(s, p);
    ad::Var low = branch_logits(H, p.Wq_low, p.Wk_low, p.a_low, p.leaky_slope);
    ad::Var high = branch_logits(H, p.Wq_high, p.Wk_high, p.a_high, p.leaky_slope);
    std::vector<ad::Var> attention = fuse_and_normalize(low, high, alpha, cfg.norm);
    ad::Var out = aggregate(H, attention, p, cfg.act);
    if (cfg.counter) {
        cfg.counter->pairwise += n_nodes * n_nodes;
        cfg.counter->macs += H.tape->mac_count - mac_before;
    }
    return out;
}

Tensor afm_forward(const Tensor& H, const AfmParams& p, const AfmConfig& cfg) {
    ad::Tape tape;
    ad::Var h = tape.leaf(H);
    AfmVars vars = AfmVars::leaves(tape, p);
    return afm_forward(h, vars, cfg).val();
}

Tensor gating_of(const Tensor& H, const AfmParams& p) {
    ad::Tape tape;
    ad::Var h = tape.leaf(H);
    AfmVars vars = AfmVars::leaves(tape, p);
    return gating_vector(channel_summary(h), vars).val();
}

}  // namespace hgfe::afm
