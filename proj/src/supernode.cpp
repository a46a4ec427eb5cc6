#include "hgfe/supernode.hpp"

namespace hgfe::supernode {

ProjectionParams ProjectionParams::init(std::size_t C, std::uint64_t seed) {
    ProjectionParams p;
    p.Wproj = init_uniform(seed + 21, {C, 2 * C}, 2 * C);
    p.bproj = init_uniform(seed + 22, {1, C}, 2 * C);
    return p;
}

std::map<std::string, Tensor> ProjectionParams::named() const {
    return {{"Wproj", Wproj}, {"bproj", bproj}};
}

ProjectionParams ProjectionParams::from_named(const std::map<std::string, Tensor>& m) {
    ProjectionParams p;
    p.Wproj = m.at("Wproj");
    p.bproj = m.at("bproj");
    return p;
}

ProjVars ProjVars::leaves(ad::Tape& tape, const ProjectionParams& p) {
    return ProjVars{tape.leaf(p.Wproj), tape.leaf(p.bproj)};
}

Tensor pool_supernodes(const std::vector<Tensor>& windows, const window::WindowGrid& grid) {
    if (windows.size() != grid.window_count())
        throw ShapeError("pool_supernodes: window count does not match grid");
    std::size_t M = grid.windows_per_sample();
    Tensor V({grid.B, M, grid.C});
    std::size_t k = 0;
    for (std::size_t b = 0; b < grid.B; ++b)
        for (std::size_t m = 0; m < M; ++m, ++k) {
            const Tensor& p = windows[k];
            for (std::size_t c = 0; c < grid.C; ++c) {
                double acc = 0.0;
                for (std::size_t s = 0; s < grid.w * grid.w; ++s)
                    acc += p[c * grid.w * grid.w + s];
                V[(b * M + m) * grid.C + c] = acc / static_cast<double>(grid.w * grid.w);
            }
        }
    return V;
}

Tensor tile_context(const Tensor& v, std::size_t w) {
    if (v.rank() != 1 && !(v.rank() == 2 && v.rows() == 1))
        throw ShapeError("tile_context: expected a length-C vector");
    std::size_t C = v.numel();
    Tensor G({C, w, w});
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t s = 0; s < w * w; ++s) G[c * w * w + s] = v[c];
    return G;
}

Tensor fuse_project(const Tensor& P, const Tensor& G, const ProjectionParams& proj) {
    if (P.rank() != 3 || G.rank() != 3 || P.shape() != G.shape())
        throw ShapeError("fuse_project: P and G must be matching C x w x w windows");
    std::size_t C = P.shape()[0], w = P.shape()[1];
    if (proj.Wproj.rows() != C || proj.Wproj.cols() != 2 * C)
        throw ShapeError("fuse_project: projection is " + proj.Wproj.shape_str() +
                         ", expected " + std::to_string(C) + "x" + std::to_string(2 * C));
    Tensor out({C, w, w});
    for (std::size_t s = 0; s < w * w; ++s) {
        for (std::size_t co = 0; co < C; ++co) {
            double acc = proj.bproj[co];
            for (std::size_t ci = 0; ci < C; ++ci) {
                acc += proj.Wproj.at(co, ci) * P[ci * w * w + s];
                acc += proj.Wproj.at(co, C + ci) * G[ci * w * w + s];
            }
            out[co * w * w + s] = acc;
        }
    }
    return out;
}

ad::Var inter_window_forward(ad::Var F_local, const afm::AfmVars& params, const ProjVars& proj,
                             std::size_t w, const afm::AfmConfig& cfg) {
    window::WindowGrid g = window::make_grid(F_local.val(), w);
    std::size_t M = g.windows_per_sample();
    ad::Tape& tape = *F_local.tape;
    std::vector<ad::Var> out_windows;
    out_windows.reserve(g.window_count());
    ad::Var WprojT = ad::transpose(proj.Wproj);
    for (std::size_t b = 0; b < g.B; ++b) {
        std::vector<ad::Var> window_nodes;
        std::vector<ad::Var> pooled;
        window_nodes.reserve(M);
        pooled.reserve(M);
        for (std::size_t wr = 0; wr < g.nh(); ++wr)
            for (std::size_t wc = 0; wc < g.nw(); ++wc) {
                ad::Var h = ad::extract_window(F_local, b, wr, wc, w);
                window_nodes.push_back(h);
                pooled.push_back(ad::mean_rows(h));
            }
        ad::Var V = ad::vstack(pooled);                       // M x C supernodes
        ad::Var V_enh = afm::afm_forward(V, params, cfg);     // AFM over the sample's graph
        for (std::size_t m = 0; m < M; ++m) {
            ad::Var context = ad::tile_rows(ad::row(V_enh, m), g.nodes_per_window());
            ad::Var cat = ad::hstack({window_nodes[m], context});  // N x 2C, P first
            out_windows.push_back(ad::add_rowvec(ad::matmul(cat, WprojT), proj.bproj));
        }
    }
    return ad::assemble_feature_map(tape, g.B, g.C, g.H, g.W, w, out_windows);
}

Tensor inter_window_forward(const Tensor& F_local, const afm::AfmParams& params,
                            const ProjectionParams& proj, std::size_t w,
                            const afm::AfmConfig& cfg) {
    ad::Tape tape;
    ad::Var f = tape.leaf(F_local);
    afm::AfmVars avars = afm::AfmVars::leaves(tape, params);
    ProjVars pvars = ProjVars::leaves(tape, proj);
    return inter_window_forward(f, avars, pvars, w, cfg).val();
}

}  // namespace hgfe::supernode
