#include "hgfe/tape.hpp"

#include <algorithm>
#include <cmath>

namespace hgfe::ad {

const Tensor& Var::val() const { return tape->value(id); }

Var Tape::leaf(Tensor value) {
    Node n;
    n.value = std::move(value);
    return {this, push(std::move(n))};
}

int Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
}

std::vector<Tensor> Tape::backward(Var output) {
    if (output.tape != this) throw ContractError("backward: output is not on this tape");
    const Tensor& out = nodes_[output.id].value;
    if (out.numel() != 1)
        throw ContractError("backward: output must be scalar, shape " + out.shape_str());
    std::vector<Tensor> grads(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        grads[i] = Tensor::zeros(nodes_[i].value.shape());
    grads[output.id].data()[0] = 1.0;
    for (int i = output.id; i >= 0; --i) {
        if (nodes_[i].backward) nodes_[i].backward(*this, nodes_[i].value, grads[i], grads);
    }
    return grads;
}

bool Tape::replay_check() {
    for (auto& node : nodes_) {
        if (!node.replay) continue;
        Tensor again = node.replay(*this);
        if (again.data() != node.value.data() || again.shape() != node.value.shape()) return false;
        node.value = std::move(again);
    }
    return true;
}

namespace {

Tape& same_tape(Var a, Var b) {
    if (a.tape != b.tape) throw ContractError("operands live on different tapes");
    return *a.tape;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
}

using BackwardFn =
    std::function<void(Tape&, const Tensor&, const Tensor&, std::vector<Tensor>&)>;

Var make(Tape& t, std::vector<int> inputs, std::function<Tensor(Tape&)> compute,
         BackwardFn backward) {
    Tape::Node n;
    n.inputs = std::move(inputs);
    n.value = compute(t);
    n.replay = compute;
    n.backward = std::move(backward);
    return {&t, t.push(std::move(n))};
}

}  // namespace

Var add(Var a, Var b) {
    Tape& t = same_tape(a, b);
    check_same_shape(a.val(), b.val(), "add");
    int ia = a.id, ib = b.id;
    return make(
        t, {ia, ib},
        [ia, ib](Tape& tp) {
            Tensor out = tp.value(ia);
            const Tensor& y = tp.value(ib);
            for (std::size_t i = 0; i < out.numel(); ++i) out[i] += y[i];
            return out;
        },
        [ia, ib](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < g.numel(); ++i) {
                grads[ia][i] += g[i];
                grads[ib][i] += g[i];
            }
        });
}

Var sub(Var a, Var b) {
    Tape& t = same_tape(a, b);
    check_same_shape(a.val(), b.val(), "sub");
    int ia = a.id, ib = b.id;
    return make(
        t, {ia, ib},
        [ia, ib](Tape& tp) {
            Tensor out = tp.value(ia);
            const Tensor& y = tp.value(ib);
            for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= y[i];
            return out;
        },
        [ia, ib](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < g.numel(); ++i) {
                grads[ia][i] += g[i];
                grads[ib][i] -= g[i];
            }
        });
}

Var mul(Var a, Var b) {
    Tape& t = same_tape(a, b);
    check_same_shape(a.val(), b.val(), "mul");
    int ia = a.id, ib = b.id;
    return make(
        t, {ia, ib},
        [ia, ib](Tape& tp) {
            Tensor out = tp.value(ia);
            const Tensor& y = tp.value(ib);
            tp.mac_count += out.numel();
            for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= y[i];
            return out;
        },
        [ia, ib](Tape& tp, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            const Tensor& x = tp.value(ia);
            const Tensor& y = tp.value(ib);
            for (std::size_t i = 0; i < g.numel(); ++i) {
                grads[ia][i] += g[i] * y[i];
                grads[ib][i] += g[i] * x[i];
            }
        });
}

Var scale(Var a, double c) {
    Tape& t = *a.tape;
    int ia = a.id;
    return make(
        t, {ia},
        [ia, c](Tape& tp) {
            Tensor out = tp.value(ia);
            for (double& v : out.data()) v *= c;
            return out;
        },
        [ia, c](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < g.numel(); ++i) grads[ia][i] += c * g[i];
        });
}

Var matmul(Var a, Var b) {
    Tape& t = same_tape(a, b);
    const Tensor& A = a.val();
    const Tensor& B = b.val();
    if (A.rank() != 2 || B.rank() != 2 || A.cols() != B.rows())
        throw ShapeError("matmul: incompatible shapes " + A.shape_str() + " and " + B.shape_str());
    int ia = a.id, ib = b.id;
    return make(
        t, {ia, ib},
        [ia, ib](Tape& tp) {
            const Tensor& X = tp.value(ia);
            const Tensor& Y = tp.value(ib);
            std::size_t m = X.rows(), k = X.cols(), n = Y.cols();
            Tensor out({m, n});
            tp.mac_count += m * k * n;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    double x = X.at(i, p);
                    for (std::size_t j = 0; j < n; ++j) out.at(i, j) += x * Y.at(p, j);
                }
            return out;
        },
        [ia, ib](Tape& tp, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            const Tensor& X = tp.value(ia);
            const Tensor& Y = tp.value(ib);
            std::size_t m = X.rows(), k = X.cols(), n = Y.cols();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    double gij = g.at(i, j);
                    for (std::size_t p = 0; p < k; ++p) {
                        grads[ia].at(i, p) += gij * Y.at(p, j);
                        grads[ib].at(p, j) += X.at(i, p) * gij;
                    }
                }
        });
}

Var transpose(Var a) {
    Tape& t = *a.tape;
    int ia = a.id;
    return make(
        t, {ia},
        [ia](Tape& tp) {
            const Tensor& X = tp.value(ia);
            Tensor out({X.cols(), X.rows()});
            for (std::size_t i = 0; i < X.rows(); ++i)
                for (std::size_t j = 0; j < X.cols(); ++j) out.at(j, i) = X.at(i, j);
            return out;
        },
        [ia](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) grads[ia].at(j, i) += g.at(i, j);
        });
}

Var sigmoid(Var a) {
    Tape& t = *a.tape;
    int ia = a.id;
    return make(
        t, {ia},
        [ia](Tape& tp) {
            Tensor out = tp.value(ia);
            for (double& v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
            return out;
        },
        [ia](Tape&, const Tensor& y, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < g.numel(); ++i) grads[ia][i] += g[i] * y[i] * (1.0 - y[i]);
        });
}

Var leaky_relu(Var a, double slope) {
    Tape& t = *a.tape;
    int ia = a.id;
    return make(
        t, {ia},
        [ia, slope](Tape& tp) {
            Tensor out = tp.value(ia);
            for (double& v : out.data()) v = v >= 0.0 ? v : slope * v;
            return out;
        },
        [ia, slope](Tape& tp, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            const Tensor& x = tp.value(ia);
            for (std::size_t i = 0; i < g.numel(); ++i)
                grads[ia][i] += g[i] * (x[i] >= 0.0 ? 1.0 : slope);
        });
}

Var exp_op(Var a) {
    Tape& t = *a.tape;
    int ia = a.id;
    return make(
        t, {ia},
        [ia](Tape& tp) {
            Tensor out = tp.value(ia);
            for (double& v : out.data()) v = std::exp(v);
            return out;
        },
        [ia](Tape&, const Tensor& y, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < g.numel(); ++i) grads[ia][i] += g[i] * y[i];
        });
}

Var softmax_rows(Var a) {
    Tape& t = *a.tape;
    if (a.val().rank() != 2) throw ShapeError("softmax_rows: expected matrix");
    int ia = a.id;
    return make(
        t, {ia},
        [ia](Tape& tp) {
            const Tensor& X = tp.value(ia);
            Tensor out(X.shape());
            std::size_t R = X.rows(), C = X.cols();
            tp.mac_count += 2 * R * C;
            for (std::size_t i = 0; i < R; ++i) {
                double m = X.at(i, 0);
                for (std::size_t j = 1; j < C; ++j) m = std::max(m, X.at(i, j));
                double z = 0.0;
                for (std::size_t j = 0; j < C; ++j) {
                    double e = std::exp(X.at(i, j) - m);
                    out.at(i, j) = e;
                    z += e;
                }
                for (std::size_t j = 0; j < C; ++j) out.at(i, j) /= z;
            }
            return out;
        },
        [ia](Tape&, const Tensor& y, const Tensor& g, std::vector<Tensor>& grads) {
            std::size_t R = y.rows(), C = y.cols();
            for (std::size_t i = 0; i < R; ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < C; ++j) dot += g.at(i, j) * y.at(i, j);
                for (std::size_t j = 0; j < C; ++j)
                    grads[ia].at(i, j) += y.at(i, j) * (g.at(i, j) - dot);
            }
        });
}

Var mean_rows(Var a) {
    Tape& t = *a.tape;
    const Tensor& X = a.val();
    if (X.rank() != 2) throw ShapeError("mean_rows: expected matrix");
    if (X.rows() == 0) throw EmptyInputError("mean_rows: empty input");
    int ia = a.id;
    return make(
        t, {ia},
        [ia](Tape& tp) {
            const Tensor& M = tp.value(ia);
            std::size_t R = M.rows(), C = M.cols();
            Tensor out({1, C});
            for (std::size_t i = 0; i < R; ++i)
                for (std::size_t j = 0; j < C; ++j) out.at(0, j) += M.at(i, j);
            for (std::size_t j = 0; j < C; ++j) out.at(0, j) /= static_cast<double>(R);
            return out;
        },
        [ia](Tape& tp, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            std::size_t R = tp.value(ia).rows(), C = tp.value(ia).cols();
            for (std::size_t i = 0; i < R; ++i)
                for (std::size_t j = 0; j < C; ++j)
                    grads[ia].at(i, j) += g.at(0, j) / static_cast<double>(R);
        });
}

Var sum_all(Var a) {
    Tape& t = *a.tape;
    int ia = a.id;
    return make(
        t, {ia},
        [ia](Tape& tp) {
            const Tensor& X = tp.value(ia);
            Tensor out({1, 1});
            for (double v : X.data()) out[0] += v;
            return out;
        },
        [ia](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < grads[ia].numel(); ++i) grads[ia][i] += g[0];
        });
}

Var column(Var m, std::size_t c) {
    Tape& t = *m.tape;
    const Tensor& M = m.val();
    if (M.rank() != 2 || c >= M.cols()) throw ShapeError("column: index out of range");
    int im = m.id;
    return make(
        t, {im},
        [im, c](Tape& tp) {
            const Tensor& X = tp.value(im);
            Tensor out({X.rows(), 1});
            for (std::size_t i = 0; i < X.rows(); ++i) out.at(i, 0) = X.at(i, c);
            return out;
        },
        [im, c](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < g.rows(); ++i) grads[im].at(i, c) += g.at(i, 0);
        });
}

Var row(Var m, std::size_t r) {
    Tape& t = *m.tape;
    const Tensor& M = m.val();
    if (M.rank() != 2 || r >= M.rows()) throw ShapeError("row: index out of range");
    int im = m.id;
    return make(
        t, {im},
        [im, r](Tape& tp) {
            const Tensor& X = tp.value(im);
            Tensor out({1, X.cols()});
            for (std::size_t j = 0; j < X.cols(); ++j) out.at(0, j) = X.at(r, j);
            return out;
        },
        [im, r](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t j = 0; j < g.cols(); ++j) grads[im].at(r, j) += g.at(0, j);
        });
}

Var slice_rows(Var m, std::size_t start, std::size_t count) {
    Tape& t = *m.tape;
    const Tensor& M = m.val();
    if (M.rank() != 2 || start + count > M.rows()) throw ShapeError("slice_rows: range out of bounds");
    int im = m.id;
    return make(
        t, {im},
        [im, start, count](Tape& tp) {
            const Tensor& X = tp.value(im);
            Tensor out({count, X.cols()});
            for (std::size_t i = 0; i < count; ++i)
                for (std::size_t j = 0; j < X.cols(); ++j) out.at(i, j) = X.at(start + i, j);
            return out;
        },
        [im, start, count](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < count; ++i)
                for (std::size_t j = 0; j < g.cols(); ++j)
                    grads[im].at(start + i, j) += g.at(i, j);
        });
}

Var hstack(const std::vector<Var>& blocks) {
    if (blocks.empty()) throw EmptyInputError("hstack: no blocks");
    Tape& t = *blocks[0].tape;
    std::size_t R = blocks[0].val().rows();
    std::vector<int> ids;
    for (const Var& b : blocks) {
        if (b.tape != &t) throw ContractError("hstack: mixed tapes");
        if (b.val().rows() != R) throw ShapeError("hstack: row count mismatch");
        ids.push_back(b.id);
    }
    return make(
        t, ids,
        [ids, R](Tape& tp) {
            std::size_t C = 0;
            for (int id : ids) C += tp.value(id).cols();
            Tensor out({R, C});
            std::size_t off = 0;
            for (int id : ids) {
                const Tensor& X = tp.value(id);
                for (std::size_t i = 0; i < R; ++i)
                    for (std::size_t j = 0; j < X.cols(); ++j) out.at(i, off + j) = X.at(i, j);
                off += X.cols();
            }
            return out;
        },
        [ids, R](Tape& tp, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            std::size_t off = 0;
            for (int id : ids) {
                std::size_t c = tp.value(id).cols();
                for (std::size_t i = 0; i < R; ++i)
                    for (std::size_t j = 0; j < c; ++j) grads[id].at(i, j) += g.at(i, off + j);
                off += c;
            }
        });
}

Var vstack(const std::vector<Var>& blocks) {
    if (blocks.empty()) throw EmptyInputError("vstack: no blocks");
    Tape& t = *blocks[0].tape;
    std::size_t C = blocks[0].val().cols();
    std::vector<int> ids;
    for (const Var& b : blocks) {
        if (b.tape != &t) throw ContractError("vstack: mixed tapes");
        if (b.val().cols() != C) throw ShapeError("vstack: column count mismatch");
        ids.push_back(b.id);
    }
    return make(
        t, ids,
        [ids, C](Tape& tp) {
            std::size_t R = 0;
            for (int id : ids) R += tp.value(id).rows();
            Tensor out({R, C});
            std::size_t off = 0;
            for (int id : ids) {
                const Tensor& X = tp.value(id);
                for (std::size_t i = 0; i < X.rows(); ++i)
                    for (std::size_t j = 0; j < C; ++j) out.at(off + i, j) = X.at(i, j);
                off += X.rows();
            }
            return out;
        },
        [ids, C](Tape& tp, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            std::size_t off = 0;
            for (int id : ids) {
                std::size_t r = tp.value(id).rows();
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < C; ++j) grads[id].at(i, j) += g.at(off + i, j);
                off += r;
            }
        });
}

Var outer_sum(Var u, Var v) {
    Tape& t = same_tape(u, v);
    if (u.val().cols() != 1 || v.val().cols() != 1)
        throw ShapeError("outer_sum: expects column vectors");
    int iu = u.id, iv = v.id;
    return make(
        t, {iu, iv},
        [iu, iv](Tape& tp) {
            const Tensor& a = tp.value(iu);
            const Tensor& b = tp.value(iv);
            std::size_t N = a.rows(), M = b.rows();
            tp.mac_count += N * M;
            Tensor out({N, M});
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = 0; j < M; ++j) out.at(i, j) = a.at(i, 0) + b.at(j, 0);
            return out;
        },
        [iu, iv](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) {
                    grads[iu].at(i, 0) += g.at(i, j);
                    grads[iv].at(j, 0) += g.at(i, j);
                }
        });
}

Var add_rowvec(Var m, Var v) {
    Tape& t = same_tape(m, v);
    const Tensor& M = m.val();
    const Tensor& V = v.val();
    if (V.rows() != 1 || V.cols() != M.cols())
        throw ShapeError("add_rowvec: shape mismatch " + M.shape_str() + " vs " + V.shape_str());
    int im = m.id, iv = v.id;
    return make(
        t, {im, iv},
        [im, iv](Tape& tp) {
            Tensor out = tp.value(im);
            const Tensor& b = tp.value(iv);
            for (std::size_t i = 0; i < out.rows(); ++i)
                for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) += b.at(0, j);
            return out;
        },
        [im, iv](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) {
                    grads[im].at(i, j) += g.at(i, j);
                    grads[iv].at(0, j) += g.at(i, j);
                }
        });
}

Var tile_rows(Var v, std::size_t n) {
    Tape& t = *v.tape;
    if (v.val().rows() != 1) throw ShapeError("tile_rows: expects a row vector");
    int iv = v.id;
    return make(
        t, {iv},
        [iv, n](Tape& tp) {
            const Tensor& b = tp.value(iv);
            Tensor out({n, b.cols()});
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) = b.at(0, j);
            return out;
        },
        [iv](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) grads[iv].at(0, j) += g.at(i, j);
        });
}

Var gate_mix(Var low, Var high, Var alpha, std::size_t c) {
    Tape& t = same_tape(low, high);
    same_tape(low, alpha);
    check_same_shape(low.val(), high.val(), "gate_mix");
    if (alpha.val().rows() != 1 || c >= alpha.val().cols())
        throw ShapeError("gate_mix: bad gate index");
    int il = low.id, ih = high.id, ia = alpha.id;
    return make(
        t, {il, ih, ia},
        [il, ih, ia, c](Tape& tp) {
            const Tensor& L = tp.value(il);
            const Tensor& H = tp.value(ih);
            double a = tp.value(ia).at(0, c);
            tp.mac_count += 2 * L.numel();
            Tensor out(L.shape());
            for (std::size_t i = 0; i < L.numel(); ++i) out[i] = a * L[i] + (1.0 - a) * H[i];
            return out;
        },
        [il, ih, ia, c](Tape& tp, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            const Tensor& L = tp.value(il);
            const Tensor& H = tp.value(ih);
            double a = tp.value(ia).at(0, c);
            double ga = 0.0;
            for (std::size_t i = 0; i < g.numel(); ++i) {
                grads[il][i] += a * g[i];
                grads[ih][i] += (1.0 - a) * g[i];
                ga += g[i] * (L[i] - H[i]);
            }
            grads[ia].at(0, c) += ga;
        });
}

Var extract_window(Var f, std::size_t b, std::size_t wr, std::size_t wc, std::size_t w) {
    Tape& t = *f.tape;
    const Tensor& F = f.val();
    if (F.rank() != 4) throw ShapeError("extract_window: expected B x C x H x W tensor");
    std::size_t C = F.shape()[1];
    if (b >= F.shape()[0] || (wr + 1) * w > F.shape()[2] || (wc + 1) * w > F.shape()[3])
        throw ShapeError("extract_window: window out of range");
    int id = f.id;
    return make(
        t, {id},
        [id, b, wr, wc, w, C](Tape& tp) {
            const Tensor& X = tp.value(id);
            Tensor out({w * w, C});
            for (std::size_t r = 0; r < w; ++r)
                for (std::size_t cc = 0; cc < w; ++cc)
                    for (std::size_t ch = 0; ch < C; ++ch)
                        out.at(r * w + cc, ch) = X.at4(b, ch, wr * w + r, wc * w + cc);
            return out;
        },
        [id, b, wr, wc, w, C](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            for (std::size_t r = 0; r < w; ++r)
                for (std::size_t cc = 0; cc < w; ++cc)
                    for (std::size_t ch = 0; ch < C; ++ch)
                        grads[id].at4(b, ch, wr * w + r, wc * w + cc) += g.at(r * w + cc, ch);
        });
}

Var assemble_feature_map(Tape& tape, std::size_t B, std::size_t C, std::size_t H, std::size_t W,
                         std::size_t w, const std::vector<Var>& windows) {
    std::size_t nh = H / w, nw = W / w;
    if (windows.size() != B * nh * nw)
        throw ShapeError("assemble_feature_map: expected " + std::to_string(B * nh * nw) +
                         " windows, got " + std::to_string(windows.size()));
    std::vector<int> ids;
    for (const Var& v : windows) {
        if (v.tape != &tape) throw ContractError("assemble_feature_map: mixed tapes");
        if (v.val().rows() != w * w || v.val().cols() != C)
            throw ShapeError("assemble_feature_map: bad window shape " + v.val().shape_str());
        ids.push_back(v.id);
    }
    return make(
        tape, ids,
        [ids, B, C, H, W, w, nh, nw](Tape& tp) {
            Tensor out({B, C, H, W});
            std::size_t k = 0;
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t wr = 0; wr < nh; ++wr)
                    for (std::size_t wc = 0; wc < nw; ++wc, ++k) {
                        const Tensor& X = tp.value(ids[k]);
                        for (std::size_t r = 0; r < w; ++r)
                            for (std::size_t cc = 0; cc < w; ++cc)
                                for (std::size_t ch = 0; ch < C; ++ch)
                                    out.at4(b, ch, wr * w + r, wc * w + cc) = X.at(r * w + cc, ch);
                    }
            return out;
        },
        [ids, B, w, nh, nw, C](Tape&, const Tensor&, const Tensor& g, std::vector<Tensor>& grads) {
            std::size_t k = 0;
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t wr = 0; wr < nh; ++wr)
                    for (std::size_t wc = 0; wc < nw; ++wc, ++k)
                        for (std::size_t r = 0; r < w; ++r)
                            for (std::size_t cc = 0; cc < w; ++cc)
                                for (std::size_t ch = 0; ch < C; ++ch)
                                    grads[ids[k]].at(r * w + cc, ch) +=
                                        g.at4(b, ch, wr * w + r, wc * w + cc);
        });
}

}  // namespace hgfe::ad
