#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hgfe/tensor.hpp"

namespace hgfe::ad {

class Tape;

/// Handle to one node on a tape.
struct Var {
    Tape* tape = nullptr;
    int id = -1;

    const Tensor& val() const;
    bool valid() const { return tape != nullptr && id >= 0; }
};

/// Reverse-mode tape. Records every primitive with enough information to
/// replay the forward pass bit-exactly and to accumulate adjoints backward.
/// One tape is owned by one forward/backward pass at a time.
class Tape {
public:
    struct Node {
        Tensor value;
        std::vector<int> inputs;
        // Recomputes value from the current values of the input nodes.
        std::function<Tensor(Tape&)> replay;
        // Accumulates d(loss)/d(input) given this node's value and adjoint.
        std::function<void(Tape&, const Tensor& self, const Tensor& grad_out,
                           std::vector<Tensor>& grads)>
            backward;
    };

    Var leaf(Tensor value);

    const Tensor& value(int id) const { return nodes_[id].value; }
    std::size_t size() const { return nodes_.size(); }

    /// Gradient of a scalar output with respect to every node.
    /// Nodes off the path keep all-zero gradients.
    std::vector<Tensor> backward(Var output);

    /// Recomputes every non-leaf node in order; returns true iff all values
    /// are reproduced bit-exactly.
    bool replay_check();

    int push(Node node);

    /// Multiply-accumulate operations performed by ops on this tape.
    std::uint64_t mac_count = 0;

private:
    std::vector<Node> nodes_;
};

// --- primitives ------------------------------------------------------------

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
Var scale(Var a, double c);
Var matmul(Var a, Var b);
Var transpose(Var a);
Var sigmoid(Var a);
Var leaky_relu(Var a, double slope);
Var exp_op(Var a);
Var softmax_rows(Var a);
Var mean_rows(Var a);
Var sum_all(Var a);
Var column(Var m, std::size_t c);             // N x C -> N x 1
Var row(Var m, std::size_t r);                // N x C -> 1 x C
Var slice_rows(Var m, std::size_t start, std::size_t count);
Var hstack(const std::vector<Var>& blocks);   // concat along columns
Var vstack(const std::vector<Var>& blocks);   // concat along rows
Var outer_sum(Var u, Var v);                  // (N x 1, M x 1) -> N x M, u_i + v_j
Var add_rowvec(Var m, Var v);                 // broadcast 1 x C over rows
Var tile_rows(Var v, std::size_t n);          // 1 x C -> N x C
/// alpha_c * low + (1 - alpha_c) * high, with alpha a 1 x C node.
Var gate_mix(Var low, Var high, Var alpha, std::size_t c);

/// Extracts window (wr, wc) of sample b from a B x C x H x W node as a
/// w^2 x C node-feature matrix, rows in row-major spatial scan order.
Var extract_window(Var f, std::size_t b, std::size_t wr, std::size_t wc, std::size_t w);

/// Inverse of extract_window over a full grid: windows ordered by
/// (b, window row, window column).
Var assemble_feature_map(Tape& tape, std::size_t B, std::size_t C, std::size_t H, std::size_t W,
                         std::size_t w, const std::vector<Var>& windows);

}  // namespace hgfe::ad
