#include "hgfe/tensor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hgfe {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, DType dtype)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0), dtype_(dtype) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data, DType dtype)
    : shape_(std::move(shape)), data_(std::move(data)), dtype_(dtype) {
    if (data_.size() != shape_product(shape_))
        throw ShapeError("data length does not match shape product");
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, DType dtype) {
    return Tensor(std::move(shape), dtype);
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value, DType dtype) {
    Tensor t(std::move(shape), dtype);
    for (double& v : t.data_) v = value;
    return t;
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
    return Tensor({rows, cols}, std::move(data));
}

std::size_t Tensor::rows() const {
    if (rank() != 2) throw ShapeError("rows(): tensor is not 2-D, shape " + shape_str());
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (rank() != 2) throw ShapeError("cols(): tensor is not 2-D, shape " + shape_str());
    return shape_[1];
}

double& Tensor::at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
double Tensor::at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

double& Tensor::at4(std::size_t b, std::size_t c, std::size_t h, std::size_t w) {
    return data_[((b * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
}
double Tensor::at4(std::size_t b, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[((b * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape_.size(); ++i) os << (i ? "x" : "") << shape_[i];
    os << ")";
    return os.str();
}

std::uint64_t SplitMix64::next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

namespace {

// Folds the shape into the seed so distinct shapes draw distinct streams.
std::uint64_t mix_seed(std::uint64_t seed, const std::vector<std::size_t>& shape) {
    SplitMix64 rng(seed);
    std::uint64_t h = rng.next();
    for (std::size_t d : shape) {
        rng.state ^= static_cast<std::uint64_t>(d) * 0x2545F4914F6CDD1Dull;
        h ^= rng.next();
    }
    return h;
}

}  // namespace

Tensor init_range(std::uint64_t seed, std::vector<std::size_t> shape, double lo, double hi) {
    Tensor t(std::move(shape));
    SplitMix64 rng(mix_seed(seed, t.shape()));
    for (double& v : t.data()) v = lo + (hi - lo) * rng.next_unit();
    return t;
}

Tensor init_uniform(std::uint64_t seed, std::vector<std::size_t> shape, std::size_t fan_in) {
    if (fan_in == 0) throw ContractError("init_uniform: fan_in must be positive");
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    return init_range(seed, std::move(shape), -bound, bound);
}

namespace {

void put_u32_le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void save_tensor(const std::string& path, const Tensor& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os.write("HGT1", 4);
    unsigned char dtype = static_cast<unsigned char>(t.dtype());
    unsigned char rank = static_cast<unsigned char>(t.rank());
    os.write(reinterpret_cast<const char*>(&dtype), 1);
    os.write(reinterpret_cast<const char*>(&rank), 1);
    for (std::size_t d : t.shape()) put_u32_le(os, static_cast<std::uint32_t>(d));
    if (t.dtype() == DType::F64) {
        for (double v : t.data()) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            unsigned char b[8];
            for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
            os.write(reinterpret_cast<const char*>(b), 8);
        }
    } else {
        for (double v : t.data()) {
            float f = static_cast<float>(v);
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            unsigned char b[4];
            for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
            os.write(reinterpret_cast<const char*>(b), 4);
        }
    }
    if (!os) throw Error("write failed: " + path);
}

Tensor load_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open for reading: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "HGT1", 4) != 0)
        throw FormatError("bad magic, expected HGT1", 0);
    if (bytes.size() < 5) throw FormatError("missing dtype byte", 4);
    unsigned char dtype_code = bytes[4];
    if (dtype_code != 1 && dtype_code != 2)
        throw FormatError("unknown dtype code " + std::to_string(dtype_code), 4);
    if (bytes.size() < 6) throw FormatError("missing rank byte", 5);
    unsigned char rank = bytes[5];
    std::size_t off = 6;
    std::vector<std::size_t> shape;
    for (unsigned r = 0; r < rank; ++r) {
        if (bytes.size() < off + 4) throw FormatError("truncated dimension list", off);
        shape.push_back(get_u32_le(bytes.data() + off));
        off += 4;
    }
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) throw FormatError("zero dimension", off);
        n *= d;
    }
    std::size_t width = dtype_code == 1 ? 4 : 8;
    if (bytes.size() != off + n * width)
        throw FormatError("payload size mismatch, expected " + std::to_string(n * width) +
                              " bytes, got " + std::to_string(bytes.size() - off),
                          off);
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (width == 8) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= static_cast<std::uint64_t>(bytes[off + i * 8 + b]) << (8 * b);
            double v;
            std::memcpy(&v, &bits, 8);
            data[i] = v;
        } else {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b)
                bits |= static_cast<std::uint32_t>(bytes[off + i * 4 + b]) << (8 * b);
            float f;
            std::memcpy(&f, &bits, 4);
            data[i] = static_cast<double>(f);
        }
    }
    return Tensor(std::move(shape), std::move(data), static_cast<DType>(dtype_code));
}

}  // namespace hgfe
