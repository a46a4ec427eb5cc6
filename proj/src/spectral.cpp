#include "hgfe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hgfe::spectral {

GraphAdjacency::GraphAdjacency(Tensor a) : A(std::move(a)) {
    if (A.rank() != 2 || A.rows() != A.cols())
        throw ShapeError("adjacency must be square, got " + A.shape_str());
    std::size_t n = A.rows();
    for (std::size_t i = 0; i < n; ++i) {
        if (A.at(i, i) != 0.0) throw ContractError("adjacency diagonal must be zero");
        for (std::size_t j = 0; j < n; ++j) {
            if (A.at(i, j) < 0.0) throw ContractError("adjacency entries must be non-negative");
            if (A.at(i, j) != A.at(j, i)) throw ContractError("adjacency must be symmetric");
        }
    }
}

GraphAdjacency GraphAdjacency::complete(std::size_t n) {
    Tensor a({n, n});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) a.at(i, j) = 1.0;
    return GraphAdjacency(std::move(a));
}

GraphAdjacency GraphAdjacency::path(std::size_t n) {
    Tensor a({n, n});
    for (std::size_t i = 0; i + 1 < n; ++i) {
        a.at(i, i + 1) = 1.0;
        a.at(i + 1, i) = 1.0;
    }
    return GraphAdjacency(std::move(a));
}

GraphAdjacency GraphAdjacency::random(std::size_t n, double p, std::uint64_t seed) {
    Tensor a({n, n});
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.next_unit() < p) {
                a.at(i, j) = 1.0;
                a.at(j, i) = 1.0;
            }
    return GraphAdjacency(std::move(a));
}

GraphAdjacency GraphAdjacency::random_connected(std::size_t n, double p, std::uint64_t seed) {
    Tensor a({n, n});
    SplitMix64 rng(seed);
    for (std::size_t i = 1; i < n; ++i) {
        // attach node i to a random earlier node: spanning tree
        std::size_t j = static_cast<std::size_t>(rng.next() % i);
        a.at(i, j) = 1.0;
        a.at(j, i) = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.next_unit() < p) {
                a.at(i, j) = 1.0;
                a.at(j, i) = 1.0;
            }
    return GraphAdjacency(std::move(a));
}

NormalizedLaplacian normalized_laplacian(const GraphAdjacency& adj) {
    std::size_t n = adj.size();
    std::vector<double> dinv_sqrt(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += adj.A.at(i, j);
        dinv_sqrt[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
    }
    Tensor L({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            L.at(i, j) = -dinv_sqrt[i] * adj.A.at(i, j) * dinv_sqrt[j];
        L.at(i, i) += 1.0;
    }
    return NormalizedLaplacian{std::move(L)};
}

SpectralBasis eigendecompose(const NormalizedLaplacian& lap) {
    std::size_t n = lap.size();
    Tensor A = lap.L;
    Tensor V({n, n});
    for (std::size_t i = 0; i < n; ++i) V.at(i, i) = 1.0;

    const int max_sweeps = 100;
    const double tol = 1e-14;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += A.at(p, q) * A.at(p, q);
        if (std::sqrt(off) <= tol * n) {
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&A](std::size_t a, std::size_t b) { return A.at(a, a) < A.at(b, b); });
            SpectralBasis basis;
            basis.U = Tensor({n, n});
            basis.lambda.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                basis.lambda[k] = A.at(order[k], order[k]);
                for (std::size_t i = 0; i < n; ++i) basis.U.at(i, k) = V.at(i, order[k]);
            }
            return basis;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = A.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double app = A.at(p, p), aqq = A.at(q, q);
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = A.at(k, p), akq = A.at(k, q);
                    A.at(k, p) = c * akp - s * akq;
                    A.at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = A.at(p, k), aqk = A.at(q, k);
                    A.at(p, k) = c * apk - s * aqk;
                    A.at(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = V.at(k, p), vkq = V.at(k, q);
                    V.at(k, p) = c * vkp - s * vkq;
                    V.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    throw NumericError("eigendecompose: Jacobi iteration did not converge in 100 sweeps");
}

std::vector<double> gft(const SpectralBasis& basis, const std::vector<double>& x,
                        GftDirection direction) {
    std::size_t n = basis.lambda.size();
    if (x.size() != n)
        throw ShapeError("gft: signal length " + std::to_string(x.size()) +
                         " does not match basis size " + std::to_string(n));
    std::vector<double> out(n, 0.0);
    if (direction == GftDirection::Forward) {
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) out[k] += basis.U.at(i, k) * x[i];
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) out[i] += basis.U.at(i, k) * x[k];
    }
    return out;
}

std::vector<double> spectral_filter_exact(const SpectralBasis& basis, const FilterFn& g,
                                          const std::vector<double>& x) {
    std::vector<double> xhat = gft(basis, x, GftDirection::Forward);
    for (std::size_t k = 0; k < xhat.size(); ++k) xhat[k] *= g(basis.lambda[k]);
    return gft(basis, xhat, GftDirection::Inverse);
}

ChebyshevCoeffs fit_chebyshev(const FilterFn& g, std::size_t K, double lambda_max) {
    if (lambda_max <= 0.0) throw ContractError("fit_chebyshev: lambda_max must be positive");
    std::size_t M = std::max<std::size_t>(K + 1, 64);
    ChebyshevCoeffs coeffs;
    coeffs.lambda_max = lambda_max;
    coeffs.theta.assign(K + 1, 0.0);
    // Chebyshev-Gauss nodes x_m = cos(pi (m + 1/2) / M) mapped to lambda.
    std::vector<double> gx(M);
    std::vector<double> xs(M);
    const double pi = 3.14159265358979323846;
    for (std::size_t m = 0; m < M; ++m) {
        xs[m] = std::cos(pi * (static_cast<double>(m) + 0.5) / static_cast<double>(M));
        gx[m] = g(lambda_max * (xs[m] + 1.0) / 2.0);
    }
    for (std::size_t k = 0; k <= K; ++k) {
        double sum = 0.0;
        for (std::size_t m = 0; m < M; ++m)
            sum += gx[m] * std::cos(static_cast<double>(k) * pi *
                                    (static_cast<double>(m) + 0.5) / static_cast<double>(M));
        coeffs.theta[k] = (k == 0 ? 1.0 : 2.0) * sum / static_cast<double>(M);
    }
    return coeffs;
}

std::vector<double> chebyshev_apply(const NormalizedLaplacian& lap, const ChebyshevCoeffs& coeffs,
                                    const std::vector<double>& x) {
    std::size_t n = lap.size();
    if (x.size() != n) throw ShapeError("chebyshev_apply: length mismatch");
    // Ltilde v = (2 / lambda_max) L v - v
    auto apply_lt = [&](const std::vector<double>& v) {
        std::vector<double> out(n, 0.0);
        double s = 2.0 / coeffs.lambda_max;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += lap.L.at(i, j) * v[j];
            out[i] = s * acc - v[i];
        }
        return out;
    };
    std::vector<double> t_prev = x;  // T_0 x
    std::vector<double> result(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) result[i] = coeffs.theta[0] * x[i];
    if (coeffs.theta.size() == 1) return result;
    std::vector<double> t_cur = apply_lt(x);  // T_1 x
    for (std::size_t i = 0; i < n; ++i) result[i] += coeffs.theta[1] * t_cur[i];
    for (std::size_t k = 2; k < coeffs.theta.size(); ++k) {
        std::vector<double> t_next = apply_lt(t_cur);
        for (std::size_t i = 0; i < n; ++i) t_next[i] = 2.0 * t_next[i] - t_prev[i];
        for (std::size_t i = 0; i < n; ++i) result[i] += coeffs.theta[k] * t_next[i];
        t_prev = std::move(t_cur);
        t_cur = std::move(t_next);
    }
    return result;
}

ChebyshevCoeffs interpolate_filter_coeffs(const ChebyshevCoeffs& theta_low,
                                          const ChebyshevCoeffs& theta_high, double alpha_c) {
    if (theta_low.theta.size() != theta_high.theta.size())
        throw ContractError("interpolate_filter_coeffs: order mismatch");
    if (theta_low.lambda_max != theta_high.lambda_max)
        throw ContractError("interpolate_filter_coeffs: lambda_max mismatch");
    ChebyshevCoeffs out;
    out.lambda_max = theta_low.lambda_max;
    out.theta.resize(theta_low.theta.size());
    for (std::size_t k = 0; k < out.theta.size(); ++k)
        out.theta[k] = alpha_c * theta_low.theta[k] + (1.0 - alpha_c) * theta_high.theta[k];
    return out;
}

double dirichlet_energy(const NormalizedLaplacian& lap, const std::vector<double>& x) {
    std::size_t n = lap.size();
    if (x.size() != n) throw ShapeError("dirichlet_energy: length mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += lap.L.at(i, j) * x[j];
        e += x[i] * acc;
    }
    return e;
}

}  // namespace hgfe::spectral
