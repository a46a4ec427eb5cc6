#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "hgfe/afm.hpp"
#include "hgfe/gradcheck.hpp"

using namespace hgfe;
using namespace hgfe::afm;

namespace {

// Straight-line evaluation of the AFM update, written against the algorithm
// directly and independent of the tape machinery.
Tensor afm_reference(const Tensor& H, const AfmParams& p, NormMode norm, OutAct act) {
    std::size_t N = H.rows(), C = H.cols(), d = p.Wq_low.cols();
    // channel summary
    std::vector<double> s(C, 0.0);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t c = 0; c < C; ++c) s[c] += H.at(i, c);
    for (double& v : s) v /= static_cast<double>(N);
    // gating
    std::vector<double> alpha(C);
    for (std::size_t c = 0; c < C; ++c) {
        double z = p.bf[c];
        for (std::size_t k = 0; k < C; ++k) z += p.Wf.at(c, k) * s[k];
        alpha[c] = 1.0 / (1.0 + std::exp(-z));
    }
    // branch logits
    auto logits = [&](const Tensor& Wq, const Tensor& Wk, const Tensor& a) {
        Tensor out({N, N});
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) {
                double acc = 0.0;
                for (std::size_t e = 0; e < d; ++e) {
                    double qi = 0.0, kj = 0.0;
                    for (std::size_t c = 0; c < C; ++c) {
                        qi += H.at(i, c) * Wq.at(c, e);
                        kj += H.at(j, c) * Wk.at(c, e);
                    }
                    acc += qi * a[e] + kj * a[d + e];
                }
                out.at(i, j) = acc >= 0.0 ? acc : p.leaky_slope * acc;
            }
        return out;
    };
    Tensor low = logits(p.Wq_low, p.Wk_low, p.a_low);
    Tensor high = logits(p.Wq_high, p.Wk_high, p.a_high);
    // value projection
    Tensor V({N, C});
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t k = 0; k < C; ++k) V.at(i, c) += H.at(i, k) * p.Wv.at(k, c);
    // fuse, normalize, aggregate per channel
    Tensor out({N, C});
    for (std::size_t c = 0; c < C; ++c) {
        Tensor A({N, N});
        for (std::size_t i = 0; i < N; ++i) {
            std::vector<double> r(N);
            for (std::size_t j = 0; j < N; ++j) {
                r[j] = alpha[c] * low.at(i, j) + (1.0 - alpha[c]) * high.at(i, j);
                if (norm == NormMode::SigmoidSoftmax) r[j] = 1.0 / (1.0 + std::exp(-r[j]));
            }
            double m = *std::max_element(r.begin(), r.end());
            double z = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                r[j] = std::exp(r[j] - m);
                z += r[j];
            }
            for (std::size_t j = 0; j < N; ++j) A.at(i, j) = r[j] / z;
        }
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < N; ++j) acc += A.at(i, j) * V.at(j, c);
            out.at(i, c) = act == OutAct::Sigmoid ? 1.0 / (1.0 + std::exp(-acc)) : acc;
        }
    }
    return out;
}

ParamMap afm_param_map(const AfmParams& p) {
    ParamMap m;
    for (const auto& [k, v] : p.named()) m[k] = v;
    return m;
}

}  // namespace

TEST_CASE("channel summary") {
    ad::Tape t;
    ad::Var H = t.leaf(Tensor::matrix(2, 2, {0, 2, 4, 0}));
    CHECK(channel_summary(H).val().data() == std::vector<double>{2, 1});
    ad::Var constant = t.leaf(Tensor::full({3, 2}, 1.5));
    CHECK(channel_summary(constant).val().data() == std::vector<double>{1.5, 1.5});
    ad::Var single = t.leaf(Tensor::matrix(1, 3, {7, 8, 9}));
    CHECK(channel_summary(single).val().data() == std::vector<double>{7, 8, 9});
}

TEST_CASE("gating vector closed forms") {
    std::size_t C = 2;
    AfmParams p = AfmParams::init(C, 2, 1);

    // Wf = 0, bf = 0 -> alpha = 0.5
    p.Wf = Tensor::zeros({C, C});
    p.bf = Tensor::zeros({1, C});
    ad::Tape t2;
    AfmVars v2 = AfmVars::leaves(t2, p);
    ad::Var s2 = t2.leaf(Tensor::matrix(1, 2, {0.3, -0.7}));
    Tensor alpha = gating_vector(s2, v2).val();
    CHECK(alpha[0] == 0.5);
    CHECK(alpha[1] == 0.5);

    // large positive bias saturates but stays below 1
    p.bf = Tensor::full({1, C}, 30.0);
    ad::Tape t3;
    AfmVars v3 = AfmVars::leaves(t3, p);
    Tensor sat = gating_vector(t3.leaf(Tensor::zeros({1, C})), v3).val();
    for (std::size_t c = 0; c < C; ++c) {
        CHECK(sat[c] > 0.999);
        CHECK(sat[c] < 1.0);
    }

    // s=[1,0], Wf=I, bf=0
    p.Wf = Tensor::matrix(2, 2, {1, 0, 0, 1});
    p.bf = Tensor::zeros({1, C});
    ad::Tape t4;
    AfmVars v4 = AfmVars::leaves(t4, p);
    Tensor g = gating_vector(t4.leaf(Tensor::matrix(1, 2, {1, 0})), v4).val();
    CHECK(g[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
    CHECK(g[1] == 0.5);
}

TEST_CASE("branch logits") {
    // zero feature matrix and zero attention vector cases
    {
        AfmParams p = AfmParams::init(2, 2, 5);
        ad::Tape t;
        AfmVars v = AfmVars::leaves(t, p);
        ad::Var H = t.leaf(Tensor::zeros({3, 2}));
        Tensor lg = branch_logits(H, v.Wq_low, v.Wk_low, v.a_low, 0.01).val();
        for (double x : lg.data()) CHECK(x == 0.0);
    }
    {
        AfmParams p = AfmParams::init(2, 2, 5);
        p.a_low = Tensor::zeros({4, 1});
        ad::Tape t;
        AfmVars v = AfmVars::leaves(t, p);
        ad::Var H = t.leaf(init_range(3, {3, 2}, -1, 1));
        Tensor lg = branch_logits(H, v.Wq_low, v.Wk_low, v.a_low, 0.01).val();
        for (double x : lg.data()) CHECK(x == 0.0);
    }
    // N=2, C=1, d=1 hand computation: logits_ij = q_i + k_j
    {
        ad::Tape t;
        ad::Var H = t.leaf(Tensor::matrix(2, 1, {1, 2}));
        ad::Var Wq = t.leaf(Tensor::matrix(1, 1, {1}));
        ad::Var Wk = t.leaf(Tensor::matrix(1, 1, {1}));
        ad::Var a = t.leaf(Tensor::matrix(2, 1, {1, 1}));
        Tensor lg = branch_logits(H, Wq, Wk, a, 0.01).val();
        CHECK(lg.data() == std::vector<double>{2, 3, 3, 4});
    }
}

TEST_CASE("fuse and normalize") {
    std::size_t N = 2, C = 3;
    ad::Tape t;
    ad::Var low = t.leaf(init_range(31, {N, N}, -1, 1));
    ad::Var alpha = t.leaf(Tensor::matrix(1, C, {0.2, 0.5, 0.9}));

    // equal branches: A_c identical for all c, independent of alpha
    auto att_same = fuse_and_normalize(low, low, alpha, NormMode::PlainSoftmax);
    for (std::size_t c = 1; c < C; ++c)
        for (std::size_t i = 0; i < N * N; ++i)
            CHECK(att_same[c].val()[i] == doctest::Approx(att_same[0].val()[i]).epsilon(1e-15));

    // alpha = 1 endpoint
    ad::Var high = t.leaf(init_range(32, {N, N}, -1, 1));
    ad::Var ones_alpha = t.leaf(Tensor::full({1, C}, 1.0));
    auto att_low = fuse_and_normalize(low, high, ones_alpha, NormMode::PlainSoftmax);
    Tensor ref = ad::softmax_rows(low).val();
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t i = 0; i < N * N; ++i) CHECK(att_low[c].val()[i] == ref[i]);

    // hand softmax: row [0, ln 3] with alpha_c = 0 selects the high branch
    ad::Var lz = t.leaf(Tensor::zeros({2, 2}));
    ad::Var hz = t.leaf(Tensor::matrix(2, 2, {0.0, std::log(3.0), 0.0, 0.0}));
    ad::Var zero_alpha = t.leaf(Tensor::zeros({1, 1}));
    auto att = fuse_and_normalize(lz, hz, zero_alpha, NormMode::PlainSoftmax);
    CHECK(att[0].val().at(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(att[0].val().at(0, 1) == doctest::Approx(0.75).epsilon(1e-12));

    // row-stochasticity invariant
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t i = 0; i < N; ++i) {
            double sum = 0;
            for (std::size_t j = 0; j < N; ++j) {
                double a = att_low[c].val().at(i, j);
                CHECK(a > 0.0);
                CHECK(a <= 1.0);
                sum += a;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
}

TEST_CASE("aggregate") {
    std::size_t C = 2;
    AfmParams p = AfmParams::init(C, 2, 7);

    // single node: attention is [1], output = act(H Wv)
    {
        ad::Tape t;
        AfmVars v = AfmVars::leaves(t, p);
        ad::Var H = t.leaf(init_range(41, {1, C}, -1, 1));
        Tensor out = afm_forward(H, v, {NormMode::PlainSoftmax, OutAct::Identity}).val();
        Tensor hv = ad::matmul(t.leaf(H.val()), t.leaf(p.Wv)).val();
        for (std::size_t i = 0; i < C; ++i) CHECK(out[i] == doctest::Approx(hv[i]).epsilon(1e-14));
    }
    // Wv = 0 -> sigmoid output all 0.5
    {
        AfmParams pz = p;
        pz.Wv = Tensor::zeros({C, C});
        Tensor out = afm_forward(init_range(42, {4, C}, -1, 1), pz,
                                 {NormMode::PlainSoftmax, OutAct::Sigmoid});
        for (double x : out.data()) CHECK(x == 0.5);
    }
    // uniform attention + identity activation: rows equal column means of V
    {
        ad::Tape t;
        AfmVars v = AfmVars::leaves(t, p);
        std::size_t N = 3;
        ad::Var H = t.leaf(init_range(43, {N, C}, -1, 1));
        ad::Var V = ad::matmul(H, v.Wv);
        std::vector<ad::Var> uniform(C, ad::softmax_rows(t.leaf(Tensor::zeros({N, N}))));
        Tensor out = aggregate(H, uniform, v, OutAct::Identity).val();
        for (std::size_t c = 0; c < C; ++c) {
            double mean = 0;
            for (std::size_t i = 0; i < N; ++i) mean += V.val().at(i, c);
            mean /= static_cast<double>(N);
            for (std::size_t i = 0; i < N; ++i)
                CHECK(out.at(i, c) == doctest::Approx(mean).epsilon(1e-12));
        }
    }
}

TEST_CASE("afm_forward matches the straight-line reference") {
    for (auto norm : {NormMode::PlainSoftmax, NormMode::SigmoidSoftmax})
        for (auto act : {OutAct::Sigmoid, OutAct::Identity}) {
            AfmParams p = AfmParams::init(2, 2, 1234);
            Tensor H = init_range(77, {4, 2}, -1.0, 1.0);
            Tensor got = afm_forward(H, p, {norm, act});
            Tensor want = afm_reference(H, p, norm, act);
            for (std::size_t i = 0; i < got.numel(); ++i)
                CHECK(std::abs(got[i] - want[i]) <= 1e-12);
        }
}

TEST_CASE("degenerate branches make the gate irrelevant") {
    AfmParams p = AfmParams::init(3, 2, 9);
    p.Wq_high = p.Wq_low;
    p.Wk_high = p.Wk_low;
    p.a_high = p.a_low;
    Tensor H = init_range(55, {5, 3}, -1.0, 1.0);
    Tensor base = afm_forward(H, p);
    SplitMix64 rng(66);
    for (int trial = 0; trial < 10; ++trial) {
        AfmParams q = p;
        q.Wf = init_range(rng.next(), {3, 3}, -2.0, 2.0);
        q.bf = init_range(rng.next(), {1, 3}, -2.0, 2.0);
        Tensor out = afm_forward(H, q);
        for (std::size_t i = 0; i < out.numel(); ++i) CHECK(std::abs(out[i] - base[i]) <= 1e-12);
    }
}

TEST_CASE("permutation equivariance") {
    AfmParams p = AfmParams::init(3, 2, 21);
    std::size_t N = 6;
    Tensor H = init_range(22, {N, 3}, -1.0, 1.0);
    Tensor out = afm_forward(H, p);
    SplitMix64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> perm(N);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = N - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.next() % (i + 1)]);
        Tensor Hp({N, 3});
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t c = 0; c < 3; ++c) Hp.at(i, c) = H.at(perm[i], c);
        Tensor outp = afm_forward(Hp, p);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t c = 0; c < 3; ++c)
                CHECK(std::abs(outp.at(i, c) - out.at(perm[i], c)) <= 1e-10);
    }
}

TEST_CASE("pre-activation values stay inside the per-channel value hull") {
    AfmParams p = AfmParams::init(3, 2, 31);
    Tensor H = init_range(32, {7, 3}, -1.0, 1.0);
    Tensor out = afm_forward(H, p, {NormMode::PlainSoftmax, OutAct::Identity});
    ad::Tape t;
    Tensor V = ad::matmul(t.leaf(H), t.leaf(p.Wv)).val();
    for (std::size_t c = 0; c < 3; ++c) {
        double lo = V.at(0, c), hi = V.at(0, c);
        for (std::size_t i = 1; i < 7; ++i) {
            lo = std::min(lo, V.at(i, c));
            hi = std::max(hi, V.at(i, c));
        }
        for (std::size_t i = 0; i < 7; ++i) {
            CHECK(out.at(i, c) >= lo - 1e-12);
            CHECK(out.at(i, c) <= hi + 1e-12);
        }
    }
}

TEST_CASE("afm gradient check at N=9, C=4, d=3") {
    AfmParams p = AfmParams::init(4, 3, 101);
    Tensor H = init_range(102, {9, 4}, -1.0, 1.0);
    ScalarFn loss = [&H, &p](ad::Tape& t, const std::map<std::string, ad::Var>& leaves) {
        AfmVars vars = AfmVars::from_named(leaves, "", p.leaky_slope);
        return ad::sum_all(afm_forward(t.leaf(H), vars, {}));
    };
    GradCheckReport rep = grad_check(loss, afm_param_map(p), 1e-5);
    CHECK(rep.pass);
    CHECK(rep.entries.size() == 9);
}
