#pragma once

#include <functional>
#include <vector>

#include "hgfe/tensor.hpp"

namespace hgfe::spectral {

/// Symmetric adjacency with non-negative weights and zero diagonal.
struct GraphAdjacency {
    Tensor A;  // N x N

    explicit GraphAdjacency(Tensor a);
    std::size_t size() const { return A.rows(); }

    static GraphAdjacency complete(std::size_t n);
    static GraphAdjacency path(std::size_t n);
    /// Erdos-Renyi draw with unit weights; deterministic in the seed.
    static GraphAdjacency random(std::size_t n, double p, std::uint64_t seed);
    /// Random graph guaranteed connected (spanning tree plus extra edges).
    static GraphAdjacency random_connected(std::size_t n, double p, std::uint64_t seed);
};

struct NormalizedLaplacian {
    Tensor L;  // N x N, symmetric PSD, spectrum in [0, 2]
    std::size_t size() const { return L.rows(); }
};

struct SpectralBasis {
    Tensor U;                    // N x N orthonormal, columns are eigenvectors
    std::vector<double> lambda;  // ascending
};

struct ChebyshevCoeffs {
    std::vector<double> theta;  // theta_0 .. theta_K
    double lambda_max = 2.0;
    std::size_t order() const { return theta.size() - 1; }
};

using FilterFn = std::function<double(double)>;

/// L = I - D^{-1/2} A D^{-1/2}; degree-0 nodes get D^{-1/2} = 0, so their
/// diagonal entry is 1.
NormalizedLaplacian normalized_laplacian(const GraphAdjacency& adj);

/// Full symmetric eigensystem via cyclic Jacobi rotations, eigenvalues
/// ascending. Throws NumericError after 100 sweeps without convergence.
SpectralBasis eigendecompose(const NormalizedLaplacian& lap);

enum class GftDirection { Forward, Inverse };
std::vector<double> gft(const SpectralBasis& basis, const std::vector<double>& x,
                        GftDirection direction);

std::vector<double> spectral_filter_exact(const SpectralBasis& basis, const FilterFn& g,
                                          const std::vector<double>& x);

/// Chebyshev-Gauss projection of g on [0, lambda_max].
ChebyshevCoeffs fit_chebyshev(const FilterFn& g, std::size_t K, double lambda_max = 2.0);

/// Three-term recurrence sum_k theta_k T_k(Ltilde) x; matrix-vector only.
std::vector<double> chebyshev_apply(const NormalizedLaplacian& lap, const ChebyshevCoeffs& coeffs,
                                    const std::vector<double>& x);

ChebyshevCoeffs interpolate_filter_coeffs(const ChebyshevCoeffs& theta_low,
                                          const ChebyshevCoeffs& theta_high, double alpha_c);

double dirichlet_energy(const NormalizedLaplacian& lap, const std::vector<double>& x);

}  // namespace hgfe::spectral
