#include <cmath>

#include "doctest.h"
#include "hgfe/spectral.hpp"

using namespace hgfe;
using namespace hgfe::spectral;

namespace {

double reconstruction_error(const NormalizedLaplacian& lap, const SpectralBasis& b) {
    std::size_t n = lap.size();
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += b.U.at(i, k) * b.lambda[k] * b.U.at(j, k);
            err = std::max(err, std::abs(acc - lap.L.at(i, j)));
        }
    return err;
}

}  // namespace

TEST_CASE("adjacency contract") {
    CHECK_THROWS_AS(GraphAdjacency(Tensor::matrix(2, 2, {0, -1, -1, 0})), ContractError);
    CHECK_THROWS_AS(GraphAdjacency(Tensor::matrix(2, 2, {0, 1, 2, 0})), ContractError);
    CHECK_THROWS_AS(GraphAdjacency(Tensor::matrix(2, 2, {1, 0, 0, 1})), ContractError);
}

TEST_CASE("normalized laplacian closed forms") {
    // K2
    auto L2 = normalized_laplacian(GraphAdjacency::complete(2));
    CHECK(L2.L.data() == std::vector<double>{1, -1, -1, 1});

    // P3: D = diag(1, 2, 1), off-diagonals -1/sqrt(2)
    auto L3 = normalized_laplacian(GraphAdjacency::path(3));
    double s = -1.0 / std::sqrt(2.0);
    CHECK(L3.L.at(0, 1) == doctest::Approx(s).epsilon(1e-15));
    CHECK(L3.L.at(1, 2) == doctest::Approx(s).epsilon(1e-15));
    CHECK(L3.L.at(0, 2) == 0.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(L3.L.at(i, i) == 1.0);

    // empty graph: isolated-node convention gives the identity
    auto Le = normalized_laplacian(GraphAdjacency(Tensor::zeros({4, 4})));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(Le.L.at(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("eigendecomposition of named graphs") {
    auto L2 = normalized_laplacian(GraphAdjacency::complete(2));
    auto b2 = eigendecompose(L2);
    CHECK(b2.lambda[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(b2.lambda[1] == doctest::Approx(2.0).epsilon(1e-12));

    auto L3 = normalized_laplacian(GraphAdjacency::path(3));
    auto b3 = eigendecompose(L3);
    CHECK(b3.lambda[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(b3.lambda[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(b3.lambda[2] == doctest::Approx(2.0).epsilon(1e-10));

    auto Lid = NormalizedLaplacian{Tensor::matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1})};
    auto bid = eigendecompose(Lid);
    for (double lam : bid.lambda) CHECK(lam == doctest::Approx(1.0).epsilon(1e-14));
    // orthonormality
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            double dot = 0;
            for (std::size_t i = 0; i < 3; ++i) dot += bid.U.at(i, a) * bid.U.at(i, b);
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-9);
        }
}

TEST_CASE("eigendecomposition invariants on random graphs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::size_t n = 4 + seed * 2;
        auto lap = normalized_laplacian(GraphAdjacency::random_connected(n, 0.3, seed));
        auto basis = eigendecompose(lap);
        CHECK(reconstruction_error(lap, basis) <= 1e-9);
        for (double lam : basis.lambda) {
            CHECK(lam >= -1e-9);
            CHECK(lam <= 2.0 + 1e-9);
        }
        // connected graph: lambda_0 = 0 with eigenvector prop. to D^{1/2} 1
        CHECK(std::abs(basis.lambda[0]) <= 1e-9);
        CHECK(basis.lambda[1] > 1e-9);
    }
}

TEST_CASE("gft forward, inverse, round trip") {
    auto L2 = normalized_laplacian(GraphAdjacency::complete(2));
    auto b2 = eigendecompose(L2);
    auto xhat = gft(b2, {1.0, 1.0}, GftDirection::Forward);
    CHECK(std::abs(std::abs(xhat[0]) - std::sqrt(2.0)) <= 1e-12);
    CHECK(std::abs(xhat[1]) <= 1e-12);

    auto zero = gft(b2, {0.0, 0.0}, GftDirection::Forward);
    CHECK(zero == std::vector<double>{0.0, 0.0});

    auto lap = normalized_laplacian(GraphAdjacency::random_connected(16, 0.25, 5));
    auto basis = eigendecompose(lap);
    std::vector<double> x(16);
    SplitMix64 rng(17);
    for (double& v : x) v = rng.next_unit() * 2.0 - 1.0;
    auto round = gft(basis, gft(basis, x, GftDirection::Forward), GftDirection::Inverse);
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(round[i] - x[i]) <= 1e-10);

    CHECK_THROWS_AS(gft(basis, {1.0, 2.0}, GftDirection::Forward), ShapeError);
}

TEST_CASE("exact spectral filter") {
    auto lap = normalized_laplacian(GraphAdjacency::random_connected(8, 0.4, 2));
    auto basis = eigendecompose(lap);
    std::vector<double> x(8);
    SplitMix64 rng(3);
    for (double& v : x) v = rng.next_unit();

    auto identity = spectral_filter_exact(basis, [](double) { return 1.0; }, x);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(identity[i] - x[i]) <= 1e-10);

    auto lx = spectral_filter_exact(basis, [](double l) { return l; }, x);
    for (std::size_t i = 0; i < 8; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < 8; ++j) acc += lap.L.at(i, j) * x[j];
        CHECK(std::abs(lx[i] - acc) <= 1e-9);
    }

    // projection onto the constant eigenvector of K2
    auto k2 = eigendecompose(normalized_laplacian(GraphAdjacency::complete(2)));
    auto proj = spectral_filter_exact(
        k2, [](double l) { return std::abs(l) < 1e-9 ? 1.0 : 0.0; }, {3.0, 1.0});
    CHECK(proj[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(proj[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("chebyshev fit closed forms") {
    auto c = fit_chebyshev([](double) { return 3.5; }, 4, 2.0);
    CHECK(c.theta[0] == doctest::Approx(3.5).epsilon(1e-14));
    for (std::size_t k = 1; k <= 4; ++k) CHECK(std::abs(c.theta[k]) <= 1e-12);

    auto lin = fit_chebyshev([](double l) { return l; }, 3, 2.0);
    CHECK(lin.theta[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lin.theta[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(lin.theta[2]) <= 1e-12);
    CHECK(std::abs(lin.theta[3]) <= 1e-12);

    // dense-grid error of the K=24 fit to exp(-2 lambda)
    auto ex = fit_chebyshev([](double l) { return std::exp(-2.0 * l); }, 24, 2.0);
    double max_err = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        double lam = 2.0 * i / 2000.0;
        double t = 2.0 * lam / 2.0 - 1.0;  // rescaled variable
        double tk_prev = 1.0, tk = t, val = ex.theta[0] + ex.theta[1] * t;
        for (std::size_t k = 2; k < ex.theta.size(); ++k) {
            double tk_next = 2.0 * t * tk - tk_prev;
            val += ex.theta[k] * tk_next;
            tk_prev = tk;
            tk = tk_next;
        }
        max_err = std::max(max_err, std::abs(val - std::exp(-2.0 * lam)));
    }
    CHECK(max_err <= 1e-6);
}

TEST_CASE("chebyshev apply basics and convergence") {
    auto lap = normalized_laplacian(GraphAdjacency::random_connected(12, 0.3, 11));
    std::vector<double> x(12);
    SplitMix64 rng(13);
    for (double& v : x) v = rng.next_unit() * 2.0 - 1.0;

    ChebyshevCoeffs t0{{1.0}, 2.0};
    auto same = chebyshev_apply(lap, t0, x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(same[i] == doctest::Approx(x[i]).epsilon(1e-14));

    ChebyshevCoeffs t1{{0.0, 1.0}, 2.0};
    auto lt = chebyshev_apply(lap, t1, x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < x.size(); ++j) acc += lap.L.at(i, j) * x[j];
        CHECK(std::abs(lt[i] - (acc - x[i])) <= 1e-12);  // Ltilde = L - I at lambda_max 2
    }

    auto basis = eigendecompose(lap);
    auto g = [](double l) { return std::exp(-2.0 * l); };
    auto exact = spectral_filter_exact(basis, g, x);
    double prev_err = 1e300;
    for (std::size_t K : {2u, 4u, 8u, 16u, 24u}) {
        auto coeffs = fit_chebyshev(g, K, 2.0);
        auto approx = chebyshev_apply(lap, coeffs, x);
        double err = 0;
        for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(approx[i] - exact[i]));
        CHECK(err <= prev_err + 1e-12);
        prev_err = err;
        if (K == 24) CHECK(err <= 1e-3);
    }
}

TEST_CASE("filter interpolation is a convex combination") {
    auto low = fit_chebyshev([](double l) { return std::exp(-2.0 * l); }, 8, 2.0);
    auto high = fit_chebyshev([](double l) { return l / 2.0; }, 8, 2.0);
    auto at1 = interpolate_filter_coeffs(low, high, 1.0);
    CHECK(at1.theta == low.theta);
    auto at0 = interpolate_filter_coeffs(low, high, 0.0);
    CHECK(at0.theta == high.theta);
    ChebyshevCoeffs a{{1.0, 0.0}, 2.0}, b{{0.0, 1.0}, 2.0};
    auto mid = interpolate_filter_coeffs(a, b, 0.5);
    CHECK(mid.theta == std::vector<double>{0.5, 0.5});

    // linearity in alpha
    for (double alpha : {0.25, 0.5, 0.75}) {
        auto r = interpolate_filter_coeffs(low, high, alpha);
        for (std::size_t k = 0; k < r.theta.size(); ++k)
            CHECK(r.theta[k] == alpha * low.theta[k] + (1.0 - alpha) * high.theta[k]);
    }

    ChebyshevCoeffs wrong{{1.0}, 2.0};
    CHECK_THROWS_AS(interpolate_filter_coeffs(low, wrong, 0.5), ContractError);
    ChebyshevCoeffs wrong_lmax{{1.0, 0.0}, 1.5};
    CHECK_THROWS_AS(interpolate_filter_coeffs(a, wrong_lmax, 0.5), ContractError);
}

TEST_CASE("dirichlet energy") {
    auto L2 = normalized_laplacian(GraphAdjacency::complete(2));
    CHECK(dirichlet_energy(L2, {4.0, 4.0}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(dirichlet_energy(L2, {1.0, -1.0}) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(dirichlet_energy(L2, {0.0, 0.0}) == 0.0);
}

TEST_CASE("low-pass filtering reduces dirichlet energy") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto lap = normalized_laplacian(GraphAdjacency::random_connected(10, 0.3, seed));
        auto basis = eigendecompose(lap);
        std::vector<double> x(10);
        SplitMix64 rng(seed * 100);
        for (double& v : x) v = rng.next_unit() * 2.0 - 1.0;
        auto filtered = spectral_filter_exact(basis, [](double l) { return std::exp(-l); }, x);
        CHECK(dirichlet_energy(lap, filtered) <= dirichlet_energy(lap, x) + 1e-12);
    }
}
