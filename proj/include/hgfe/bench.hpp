#pragma once

#include <cstdint>
#include <vector>

#include "hgfe/afm.hpp"

namespace hgfe::bench {

using afm::OpCounter;

/// Linear realizations of the affinity and transform maps of the non-local
/// block.
struct NonlocalParams {
    Tensor phi, psi, g;  // each C x C

    static NonlocalParams init(std::size_t C, std::uint64_t seed);
};

enum class NonlocalNorm { Softmax, Mean };

/// Non-local response over a single C x H x W sample; softmax-normalized
/// pairwise affinities (or uniform 1/N for the mean variant).
Tensor nonlocal_forward(const Tensor& x, const NonlocalParams& params, OpCounter& counter,
                        NonlocalNorm norm = NonlocalNorm::Softmax);

/// softmax(Q K^T / sqrt(d)) V.
Tensor dot_product_attention(const Tensor& Q, const Tensor& K, const Tensor& V,
                             OpCounter& counter);

struct PairwiseCount {
    std::uint64_t full;       // (HW)^2
    std::uint64_t supernode;  // (nh nw)^2
    std::uint64_t ratio;      // w^4
};

PairwiseCount pairwise_op_count(std::size_t H, std::size_t W, std::size_t w);

struct BenchRow {
    std::size_t H, W;
    std::uint64_t full_count, supernode_count;
    double full_time_ms, supernode_time_ms;
};

/// Attention micro-benchmark over full grids vs supernode grids.
/// Counts are deterministic; times are medians of `repeats` runs.
std::vector<BenchRow> bench_scaling(const std::vector<std::pair<std::size_t, std::size_t>>& sizes,
                                    std::size_t w, std::size_t d, std::size_t repeats,
                                    std::uint64_t seed, bool use_f32 = false);

}  // namespace hgfe::bench
