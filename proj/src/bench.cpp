#include "hgfe/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace hgfe::bench {

NonlocalParams NonlocalParams::init(std::size_t C, std::uint64_t seed) {
    NonlocalParams p;
    p.phi = init_uniform(seed + 31, {C, C}, C);
    p.psi = init_uniform(seed + 32, {C, C}, C);
    p.g = init_uniform(seed + 33, {C, C}, C);
    return p;
}

namespace {

// Position features of a C x H x W sample as an HW x C matrix.
Tensor positions(const Tensor& x) {
    if (x.rank() != 3) throw ShapeError("expected C x H x W sample, got " + x.shape_str());
    std::size_t C = x.shape()[0], HW = x.shape()[1] * x.shape()[2];
    Tensor out({HW, C});
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t s = 0; s < HW; ++s) out.at(s, c) = x[c * HW + s];
    return out;
}

Tensor apply_map(const Tensor& X, const Tensor& W) {
    Tensor out({X.rows(), W.rows()});
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t o = 0; o < W.rows(); ++o) {
            double acc = 0.0;
            for (std::size_t c = 0; c < X.cols(); ++c) acc += W.at(o, c) * X.at(i, c);
            out.at(i, o) = acc;
        }
    return out;
}

}  // namespace

Tensor nonlocal_forward(const Tensor& x, const NonlocalParams& params, OpCounter& counter,
                        NonlocalNorm norm) {
    std::size_t C = x.shape()[0], H = x.shape()[1], W = x.shape()[2];
    std::size_t HW = H * W;
    Tensor X = positions(x);
    Tensor Phi = apply_map(X, params.phi);
    Tensor Psi = apply_map(X, params.psi);
    Tensor G = apply_map(X, params.g);
    Tensor out({C, H, W});
    counter.pairwise += static_cast<std::uint64_t>(HW) * HW;
    counter.macs += static_cast<std::uint64_t>(HW) * HW * C;
    for (std::size_t i = 0; i < HW; ++i) {
        std::vector<double> weight(HW);
        if (norm == NonlocalNorm::Softmax) {
            double m = -1e300;
            for (std::size_t j = 0; j < HW; ++j) {
                double aff = 0.0;
                for (std::size_t c = 0; c < C; ++c) aff += Phi.at(i, c) * Psi.at(j, c);
                weight[j] = aff;
                m = std::max(m, aff);
            }
            double z = 0.0;
            for (std::size_t j = 0; j < HW; ++j) {
                weight[j] = std::exp(weight[j] - m);
                z += weight[j];
            }
            for (std::size_t j = 0; j < HW; ++j) weight[j] /= z;
        } else {
            std::fill(weight.begin(), weight.end(), 1.0 / static_cast<double>(HW));
        }
        for (std::size_t c = 0; c < C; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < HW; ++j) acc += weight[j] * G.at(j, c);
            out[c * HW + i] = acc;
        }
    }
    return out;
}

Tensor dot_product_attention(const Tensor& Q, const Tensor& K, const Tensor& V,
                             OpCounter& counter) {
    if (Q.rank() != 2 || !Q.same_shape(K) || V.rows() != Q.rows())
        throw ContractError("dot_product_attention: Q, K, V must share N (and Q, K share d)");
    std::size_t N = Q.rows(), d = Q.cols(), dv = V.cols();
    double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    counter.pairwise += static_cast<std::uint64_t>(N) * N;
    counter.macs += static_cast<std::uint64_t>(N) * N * (d + dv);
    Tensor out({N, dv});
    std::vector<double> logits(N);
    for (std::size_t i = 0; i < N; ++i) {
        double m = -1e300;
        for (std::size_t j = 0; j < N; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < d; ++p) acc += Q.at(i, p) * K.at(j, p);
            logits[j] = acc * inv_sqrt_d;
            m = std::max(m, logits[j]);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            logits[j] = std::exp(logits[j] - m);
            z += logits[j];
        }
        for (std::size_t j = 0; j < N; ++j) {
            double a = logits[j] / z;
            for (std::size_t p = 0; p < dv; ++p) out.at(i, p) += a * V.at(j, p);
        }
    }
    return out;
}

PairwiseCount pairwise_op_count(std::size_t H, std::size_t W, std::size_t w) {
    if (H % w != 0)
        throw PartitionError("H=" + std::to_string(H) + " is not divisible by w=" + std::to_string(w));
    if (W % w != 0)
        throw PartitionError("W=" + std::to_string(W) + " is not divisible by w=" + std::to_string(w));
    PairwiseCount r;
    std::uint64_t hw = static_cast<std::uint64_t>(H) * W;
    std::uint64_t m = static_cast<std::uint64_t>(H / w) * (W / w);
    r.full = hw * hw;
    r.supernode = m * m;
    r.ratio = r.full / r.supernode;  // exact: equals w^4 under divisibility
    return r;
}

namespace {

template <typename Real>
double timed_attention(std::size_t N, std::size_t d, std::uint64_t seed) {
    // Raw typed kernel so the f32/f64 switch measures real arithmetic width.
    std::vector<Real> Q(N * d), K(N * d), V(N * d);
    SplitMix64 rng(seed);
    for (auto& v : Q) v = static_cast<Real>(rng.next_unit() - 0.5);
    for (auto& v : K) v = static_cast<Real>(rng.next_unit() - 0.5);
    for (auto& v : V) v = static_cast<Real>(rng.next_unit() - 0.5);
    std::vector<Real> out(N * d, Real(0));
    std::vector<Real> logits(N);
    Real inv_sqrt_d = Real(1) / std::sqrt(static_cast<Real>(d));
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < N; ++i) {
        Real m = -std::numeric_limits<Real>::infinity();
        for (std::size_t j = 0; j < N; ++j) {
            Real acc = 0;
            for (std::size_t p = 0; p < d; ++p) acc += Q[i * d + p] * K[j * d + p];
            logits[j] = acc * inv_sqrt_d;
            m = std::max(m, logits[j]);
        }
        Real z = 0;
        for (std::size_t j = 0; j < N; ++j) {
            logits[j] = std::exp(logits[j] - m);
            z += logits[j];
        }
        for (std::size_t j = 0; j < N; ++j) {
            Real a = logits[j] / z;
            for (std::size_t p = 0; p < d; ++p) out[i * d + p] += a * V[j * d + p];
        }
    }
    auto t1 = std::chrono::steady_clock::now();
    volatile Real sink = out[0];
    (void)sink;
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

double median_time(std::size_t N, std::size_t d, std::size_t repeats, std::uint64_t seed,
                   bool use_f32) {
    std::vector<double> times;
    for (std::size_t r = 0; r < repeats; ++r)
        times.push_back(use_f32 ? timed_attention<float>(N, d, seed + r)
                                : timed_attention<double>(N, d, seed + r));
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

}  // namespace

std::vector<BenchRow> bench_scaling(const std::vector<std::pair<std::size_t, std::size_t>>& sizes,
                                    std::size_t w, std::size_t d, std::size_t repeats,
                                    std::uint64_t seed, bool use_f32) {
    std::vector<BenchRow> rows;
    for (auto [H, W] : sizes) {
        PairwiseCount pc = pairwise_op_count(H, W, w);
        BenchRow row;
        row.H = H;
        row.W = W;
        row.full_count = pc.full;
        row.supernode_count = pc.supernode;
        row.full_time_ms = median_time(H * W, d, repeats, seed, use_f32);
        row.supernode_time_ms = median_time((H / w) * (W / w), d, repeats, seed + 99, use_f32);
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(),
              [](const BenchRow& a, const BenchRow& b) { return a.H * a.W < b.H * b.W; });
    return rows;
}

}  // namespace hgfe::bench
