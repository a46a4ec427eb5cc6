#include <cmath>

#include "doctest.h"
#include "hgfe/bench.hpp"

using namespace hgfe;
using namespace hgfe::bench;

TEST_CASE("non-local block with identity maps and mean weighting averages the input") {
    std::size_t C = 2, H = 2, W = 2;
    NonlocalParams p;
    p.phi = Tensor::matrix(C, C, {1, 0, 0, 1});
    p.psi = p.phi;
    p.g = p.phi;
    Tensor x = init_range(201, {C, H, W}, -1, 1);
    OpCounter counter;
    Tensor out = nonlocal_forward(x, p, counter, NonlocalNorm::Mean);
    for (std::size_t c = 0; c < C; ++c) {
        double mean = 0;
        for (std::size_t s = 0; s < H * W; ++s) mean += x[c * H * W + s];
        mean /= static_cast<double>(H * W);
        for (std::size_t s = 0; s < H * W; ++s)
            CHECK(out[c * H * W + s] == doctest::Approx(mean).epsilon(1e-15));
    }
    CHECK(counter.pairwise == 16);
}

TEST_CASE("non-local softmax on a single position is the identity of g(x)") {
    std::size_t C = 3;
    NonlocalParams p = NonlocalParams::init(C, 202);
    Tensor x = init_range(203, {C, 1, 1}, -1, 1);
    OpCounter counter;
    Tensor out = nonlocal_forward(x, p, counter);
    for (std::size_t co = 0; co < C; ++co) {
        double acc = 0;
        for (std::size_t ci = 0; ci < C; ++ci) acc += p.g.at(co, ci) * x[ci];
        CHECK(out[co] == doctest::Approx(acc).epsilon(1e-14));
    }
    CHECK(counter.pairwise == 1);
}

TEST_CASE("non-local counter accumulates (HW)^2 per call") {
    NonlocalParams p = NonlocalParams::init(2, 204);
    Tensor x = init_range(205, {2, 4, 4}, -1, 1);
    OpCounter counter;
    nonlocal_forward(x, p, counter);
    CHECK(counter.pairwise == 256);
    nonlocal_forward(x, p, counter);
    CHECK(counter.pairwise == 512);
}

TEST_CASE("dot-product attention hand example") {
    // Q = K with rows e_1, e_2 scaled so logits are 1 apart after 1/sqrt(d).
    Tensor Q = Tensor::matrix(2, 1, {0.0, 1.0});
    Tensor K = Q;
    Tensor V = Tensor::matrix(2, 1, {1.0, 3.0});
    OpCounter counter;
    Tensor out = dot_product_attention(Q, K, V, counter);
    // row 0: logits (0, 0) -> uniform -> 2.0
    CHECK(out.at(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    // row 1: logits (0, 1) -> (1 + 3e) / (1 + e)
    double e = std::exp(1.0);
    CHECK(out.at(1, 0) == doctest::Approx((1.0 + 3.0 * e) / (1.0 + e)).epsilon(1e-14));
    CHECK(counter.pairwise == 4);

    Tensor bad = Tensor::matrix(3, 1, {0, 0, 0});
    CHECK_THROWS_AS(dot_product_attention(Q, bad, V, counter), ContractError);
}

TEST_CASE("attention outputs stay in the convex hull of the values") {
    Tensor Q = init_range(211, {6, 3}, -2, 2);
    Tensor K = init_range(212, {6, 3}, -2, 2);
    Tensor V = init_range(213, {6, 2}, -5, 5);
    OpCounter counter;
    Tensor out = dot_product_attention(Q, K, V, counter);
    for (std::size_t c = 0; c < 2; ++c) {
        double lo = V.at(0, c), hi = V.at(0, c);
        for (std::size_t j = 1; j < 6; ++j) {
            lo = std::min(lo, V.at(j, c));
            hi = std::max(hi, V.at(j, c));
        }
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(out.at(i, c) >= lo - 1e-12);
            CHECK(out.at(i, c) <= hi + 1e-12);
        }
    }
}

TEST_CASE("pairwise operation counts") {
    PairwiseCount pc = pairwise_op_count(64, 64, 8);
    CHECK(pc.full == 16777216);
    CHECK(pc.supernode == 4096);
    CHECK(pc.ratio == 4096);  // w^4

    PairwiseCount small = pairwise_op_count(4, 4, 2);
    CHECK(small.full == 256);
    CHECK(small.supernode == 16);
    CHECK(small.ratio == 16);

    PairwiseCount rect = pairwise_op_count(8, 4, 4);
    CHECK(rect.full == 1024);
    CHECK(rect.supernode == 4);
    CHECK(rect.ratio == 256);

    CHECK_THROWS_AS(pairwise_op_count(5, 4, 2), PartitionError);
}

TEST_CASE("scaling benchmark reports exact counts and ordered rows") {
    auto rows = bench_scaling({{16, 16}, {8, 8}}, 4, 2, 1, 17);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].H == 8);  // sorted by H * W
    CHECK(rows[0].full_count == 4096);
    CHECK(rows[0].supernode_count == 16);
    CHECK(rows[1].full_count == 65536);
    CHECK(rows[1].supernode_count == 256);
    for (const auto& r : rows) {
        CHECK(r.full_time_ms >= 0.0);
        CHECK(r.supernode_time_ms >= 0.0);
    }

    auto f32_rows = bench_scaling({{8, 8}}, 4, 2, 1, 17, true);
    CHECK(f32_rows[0].full_count == 4096);
}
