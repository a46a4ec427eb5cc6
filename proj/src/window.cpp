#include "hgfe/window.hpp"

namespace hgfe::window {

WindowGrid make_grid(const Tensor& F, std::size_t w, PadMode mode) {
    if (F.rank() != 4) throw ShapeError("expected B x C x H x W tensor, got " + F.shape_str());
    if (w < 1) throw ContractError("window size must be >= 1");
    std::size_t H = F.shape()[2], W = F.shape()[3];
    if (mode == PadMode::Strict) {
        if (H % w != 0)
            throw PartitionError("H=" + std::to_string(H) + " is not divisible by w=" +
                                 std::to_string(w));
        if (W % w != 0)
            throw PartitionError("W=" + std::to_string(W) + " is not divisible by w=" +
                                 std::to_string(w));
    }
    return WindowGrid{F.shape()[0], F.shape()[1], H, W, w};
}

std::vector<Tensor> partition_windows(const Tensor& F, const WindowGrid& g) {
    std::vector<Tensor> out;
    out.reserve(g.window_count());
    for (std::size_t b = 0; b < g.B; ++b)
        for (std::size_t wr = 0; wr < g.nh(); ++wr)
            for (std::size_t wc = 0; wc < g.nw(); ++wc) {
                Tensor p({g.C, g.w, g.w});
                for (std::size_t c = 0; c < g.C; ++c)
                    for (std::size_t r = 0; r < g.w; ++r)
                        for (std::size_t cc = 0; cc < g.w; ++cc)
                            p[(c * g.w + r) * g.w + cc] =
                                F.at4(b, c, wr * g.w + r, wc * g.w + cc);
                out.push_back(std::move(p));
            }
    return out;
}

Tensor reassemble(const std::vector<Tensor>& windows, const WindowGrid& g) {
    if (windows.size() != g.window_count())
        throw ShapeError("reassemble: expected " + std::to_string(g.window_count()) + " windows");
    Tensor F({g.B, g.C, g.H, g.W});
    std::size_t k = 0;
    for (std::size_t b = 0; b < g.B; ++b)
        for (std::size_t wr = 0; wr < g.nh(); ++wr)
            for (std::size_t wc = 0; wc < g.nw(); ++wc, ++k) {
                const Tensor& p = windows[k];
                for (std::size_t c = 0; c < g.C; ++c)
                    for (std::size_t r = 0; r < g.w; ++r)
                        for (std::size_t cc = 0; cc < g.w; ++cc)
                            F.at4(b, c, wr * g.w + r, wc * g.w + cc) =
                                p[(c * g.w + r) * g.w + cc];
            }
    return F;
}

Tensor window_to_nodes(const Tensor& P) {
    if (P.rank() != 3) throw ShapeError("window_to_nodes: expected C x w x w");
    std::size_t C = P.shape()[0], w = P.shape()[1];
    if (P.shape()[2] != w) throw ShapeError("window_to_nodes: window must be square");
    Tensor H({w * w, C});
    for (std::size_t r = 0; r < w; ++r)
        for (std::size_t cc = 0; cc < w; ++cc)
            for (std::size_t c = 0; c < C; ++c)
                H.at(r * w + cc, c) = P[(c * w + r) * w + cc];
    return H;
}

Tensor nodes_to_window(const Tensor& H, std::size_t C, std::size_t w) {
    if (H.rank() != 2 || H.rows() != w * w || H.cols() != C)
        throw ShapeError("nodes_to_window: expected " + std::to_string(w * w) + " x " +
                         std::to_string(C) + " node matrix, got " + H.shape_str());
    Tensor P({C, w, w});
    for (std::size_t r = 0; r < w; ++r)
        for (std::size_t cc = 0; cc < w; ++cc)
            for (std::size_t c = 0; c < C; ++c)
                P[(c * w + r) * w + cc] = H.at(r * w + cc, c);
    return P;
}

ad::Var intra_window_forward(ad::Var F, const afm::AfmVars& params, std::size_t w,
                             const afm::AfmConfig& cfg) {
    WindowGrid g = make_grid(F.val(), w);
    std::vector<ad::Var> out_windows;
    out_windows.reserve(g.window_count());
    for (std::size_t b = 0; b < g.B; ++b)
        for (std::size_t wr = 0; wr < g.nh(); ++wr)
            for (std::size_t wc = 0; wc < g.nw(); ++wc) {
                ad::Var h = ad::extract_window(F, b, wr, wc, w);
                out_windows.push_back(afm::afm_forward(h, params, cfg));
            }
    return ad::assemble_feature_map(*F.tape, g.B, g.C, g.H, g.W, w, out_windows);
}

Tensor intra_window_forward(const Tensor& F, const afm::AfmParams& params, std::size_t w,
                            const afm::AfmConfig& cfg) {
    ad::Tape tape;
    ad::Var f = tape.leaf(F);
    afm::AfmVars vars = afm::AfmVars::leaves(tape, params);
    return intra_window_forward(f, vars, w, cfg).val();
}

}  // namespace hgfe::window
