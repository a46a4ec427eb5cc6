#pragma once

#include "hgfe/window.hpp"

namespace hgfe::supernode {

/// 1x1 projection from [P || G] (2C channels) back to C channels.
struct ProjectionParams {
    Tensor Wproj;  // C x 2C
    Tensor bproj;  // 1 x C

    static ProjectionParams init(std::size_t C, std::uint64_t seed);
    std::map<std::string, Tensor> named() const;
    static ProjectionParams from_named(const std::map<std::string, Tensor>& m);
};

struct ProjVars {
    ad::Var Wproj, bproj;
    static ProjVars leaves(ad::Tape& tape, const ProjectionParams& p);
};

/// Spatial mean of each window per channel: B x M x C supernode features.
Tensor pool_supernodes(const std::vector<Tensor>& windows, const window::WindowGrid& grid);

/// v tiled across a w x w window.
Tensor tile_context(const Tensor& v, std::size_t w);

/// Per-pixel affine map of the concatenated [P || G] window down to C channels.
Tensor fuse_project(const Tensor& P, const Tensor& G, const ProjectionParams& proj);

/// Global stage. AFM runs per batch sample over that sample's supernodes.
ad::Var inter_window_forward(ad::Var F_local, const afm::AfmVars& params, const ProjVars& proj,
                             std::size_t w, const afm::AfmConfig& cfg = {});
Tensor inter_window_forward(const Tensor& F_local, const afm::AfmParams& params,
                            const ProjectionParams& proj, std::size_t w,
                            const afm::AfmConfig& cfg = {});

}  // namespace hgfe::supernode
