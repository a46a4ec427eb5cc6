#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hgfe/tape.hpp"

namespace hgfe {

/// Named parameter set handed to a scalar function under test.
using ParamMap = std::map<std::string, Tensor>;

/// Builds a scalar loss from parameter leaves registered on the given tape.
/// The callee must create each parameter with tape.leaf() via the supplied
/// lookup so gradients can be traced back to it.
using ScalarFn = std::function<ad::Var(ad::Tape&, const std::map<std::string, ad::Var>&)>;

/// Plain scalar function of the raw parameter values, used for finite
/// differences (no tape involvement).
using PlainScalarFn = std::function<double(const ParamMap&)>;

struct GradCheckEntry {
    std::string name;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double tolerance = 0.0;
    bool pass = false;

    double max_rel_err() const;
};

/// Central differences (f(x + eps e_i) - f(x - eps e_i)) / (2 eps) per
/// coordinate of params[name].
Tensor finite_diff_grad(const PlainScalarFn& f, ParamMap params, const std::string& name,
                        double eps);

/// Tape gradients of f with respect to every parameter.
std::map<std::string, Tensor> tape_gradients(const ScalarFn& f, const ParamMap& params);

/// Compares reverse-mode gradients against central differences.
/// A coordinate passes when |a - b| <= tol + tol * max(|a|, |b|); the
/// reported relative error uses |a - b| / max(|a|, |b|, 1e-8).
GradCheckReport grad_check(const ScalarFn& f, const ParamMap& params, double tol,
                           double eps = 1e-6);

}  // namespace hgfe
