#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hgfe/errors.hpp"

namespace hgfe {

enum class DType : std::uint8_t { F32 = 1, F64 = 2 };

/// Dense row-major tensor. Storage is always double; the dtype tag controls
/// on-disk width and benchmark precision.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::vector<std::size_t> shape, DType dtype = DType::F64);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data, DType dtype = DType::F64);

    static Tensor zeros(std::vector<std::size_t> shape, DType dtype = DType::F64);
    static Tensor full(std::vector<std::size_t> shape, double value, DType dtype = DType::F64);
    /// 2-D convenience constructor from nested initializer data.
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    const std::vector<std::size_t>& shape() const { return shape_; }
    DType dtype() const { return dtype_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t numel() const { return data_.size(); }

    std::size_t rows() const;
    std::size_t cols() const;

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t i, std::size_t j);
    double at(std::size_t i, std::size_t j) const;

    /// 4-D accessor (B, C, H, W).
    double& at4(std::size_t b, std::size_t c, std::size_t h, std::size_t w);
    double at4(std::size_t b, std::size_t c, std::size_t h, std::size_t w) const;

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

    std::string shape_str() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
    DType dtype_ = DType::F64;
};

/// Deterministic uniform init on [-1/sqrt(fan_in), +1/sqrt(fan_in)].
/// Pure function of (seed, shape, fan_in): equal arguments give bit-identical
/// tensors.
Tensor init_uniform(std::uint64_t seed, std::vector<std::size_t> shape, std::size_t fan_in);

/// Uniform samples on [lo, hi), same determinism contract.
Tensor init_range(std::uint64_t seed, std::vector<std::size_t> shape, double lo, double hi);

/// splitmix64 stream; the basis of all seeding in this project.
struct SplitMix64 {
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    double next_unit();  // [0, 1)
    std::uint64_t state;
};

/// HGT1 container: magic "HGT1", dtype byte, rank byte, u32-LE dims,
/// row-major little-endian payload.
void save_tensor(const std::string& path, const Tensor& t);
Tensor load_tensor(const std::string& path);

}  // namespace hgfe
