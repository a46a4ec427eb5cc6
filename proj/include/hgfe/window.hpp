#pragma once

#include "hgfe/afm.hpp"

namespace hgfe::window {

/// Partition geometry of a B x C x H x W map into w x w windows.
struct WindowGrid {
    std::size_t B, C, H, W, w;
    std::size_t nh() const { return H / w; }
    std::size_t nw() const { return W / w; }
    std::size_t windows_per_sample() const { return nh() * nw(); }
    std::size_t window_count() const { return B * windows_per_sample(); }
    std::size_t nodes_per_window() const { return w * w; }
};

enum class PadMode { Strict, ZeroPad };

/// Validates divisibility (strict mode) and builds the grid.
/// Throws PartitionError naming the offending dimension.
WindowGrid make_grid(const Tensor& F, std::size_t w, PadMode mode = PadMode::Strict);

/// Windows in canonical order (b, window row, window column), each stored as
/// a C x w x w tensor.
std::vector<Tensor> partition_windows(const Tensor& F, const WindowGrid& grid);
Tensor reassemble(const std::vector<Tensor>& windows, const WindowGrid& grid);

/// C x w x w window <-> w^2 x C node matrix, row-major spatial scan.
Tensor window_to_nodes(const Tensor& P);
Tensor nodes_to_window(const Tensor& H, std::size_t C, std::size_t w);

/// Local stage: shared-parameter AFM on every window's fully connected graph.
ad::Var intra_window_forward(ad::Var F, const afm::AfmVars& params, std::size_t w,
                             const afm::AfmConfig& cfg = {});
Tensor intra_window_forward(const Tensor& F, const afm::AfmParams& params, std::size_t w,
                            const afm::AfmConfig& cfg = {});

}  // namespace hgfe::window
