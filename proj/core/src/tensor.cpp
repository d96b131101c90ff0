#include "c2p/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stack>
#include <unordered_set>

namespace c2p::ag {

namespace {

thread_local bool g_grad_enabled = true;

// outer * lane * inner decomposition of a shape around one axis; element
// (o, l, i) sits at flat index (o * lane + l) * inner + i.
struct Lanes {
    std::size_t outer = 1, lane = 1, inner = 1;
};

Lanes lanes_of(const Shape& shape, std::size_t axis) {
    if (axis >= shape.size())
        throw ConfigError("axis " + std::to_string(axis) +
                          " out of range for shape " + shape_str(shape));
    Lanes l;
    for (std::size_t i = 0; i < axis; ++i) l.outer *= shape[i];
    l.lane = shape[axis];
    for (std::size_t i = axis + 1; i < shape.size(); ++i) l.inner *= shape[i];
    return l;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw ConfigError(std::string(op) + ": shape mismatch " +
                          shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

void require_rank(const Tensor& a, std::size_t rank, const char* op) {
    if (a.rank() != rank)
        throw ConfigError(std::string(op) + ": expected rank " +
                          std::to_string(rank) + ", got shape " +
                          shape_str(a.shape()));
}

void accumulate(detail::Node& dst, std::span<const double> g) {
    dst.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) dst.grad[i] += g[i];
}

}  // namespace

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
    g_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

// ---- Tensor basics ----

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double fill, bool requires_grad) {
    auto n = std::make_shared<detail::Node>();
    n->value.assign(numel(shape), fill);
    n->shape = std::move(shape);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data,
                         bool requires_grad) {
    if (data.size() != numel(shape))
        throw ConfigError("from_data: " + std::to_string(data.size()) +
                          " values for shape " + shape_str(shape));
    auto n = std::make_shared<detail::Node>();
    n->shape = std::move(shape);
    n->value = std::move(data);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
}

Tensor Tensor::scalar_value(double v, bool requires_grad) {
    return from_data({}, {v}, requires_grad);
}

const Shape& Tensor::shape() const {
    if (!node_) throw ConfigError("use of undefined tensor");
    return node_->shape;
}

std::size_t Tensor::size() const {
    if (!node_) throw ConfigError("use of undefined tensor");
    return node_->value.size();
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

std::span<const double> Tensor::data() const {
    if (!node_) throw ConfigError("use of undefined tensor");
    return node_->value;
}

std::span<double> Tensor::mutable_data() {
    if (!node_) throw ConfigError("use of undefined tensor");
    return node_->value;
}

std::span<const double> Tensor::grad() const {
    if (!node_) throw ConfigError("use of undefined tensor");
    node_->ensure_grad();
    return node_->grad;
}

double Tensor::at(std::size_t flat_index) const { return data()[flat_index]; }

double Tensor::scalar() const {
    if (size() != 1)
        throw ConfigError("scalar() on tensor of shape " + shape_str(shape()));
    return node_->value[0];
}

void Tensor::zero_grad() {
    if (node_) node_->grad.assign(node_->value.size(), 0.0);
}

Tensor Tensor::detach() const {
    if (!node_) return Tensor();
    auto n = std::make_shared<detail::Node>();
    n->shape = node_->shape;
    n->value = node_->value;
    n->requires_grad = false;
    return Tensor(std::move(n));
}

// Every op funnels through here: validates finiteness, wires parents and
// the backward closure only when recording is on and some input needs it.
Tensor make_op(Shape shape, std::vector<double> value,
               std::vector<Tensor> parents,
               std::function<void(detail::Node&)> backward_fn,
               const char* opname) {
    for (double v : value)
        if (!std::isfinite(v))
            throw NumericError(std::string(opname) +
                               ": non-finite value in result");
    auto n = std::make_shared<detail::Node>();
    n->shape = std::move(shape);
    n->value = std::move(value);
    bool record = g_grad_enabled &&
                  std::any_of(parents.begin(), parents.end(),
                              [](const Tensor& t) { return t.requires_grad(); });
    if (record) {
        n->requires_grad = true;
        n->parents.reserve(parents.size());
        for (const Tensor& t : parents) n->parents.push_back(t.node());
        n->backward_fn = std::move(backward_fn);
    }
    return Tensor(std::move(n));
}

// ---- linear ops ----

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    auto av = a.data(), bv = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
    return make_op(
        a.shape(), std::move(out), {a, b},
        [](detail::Node& self) {
            for (auto& p : self.parents)
                if (p->requires_grad) accumulate(*p, self.grad);
        },
        "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    std::vector<double> out(a.size());
    auto av = a.data(), bv = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
    return make_op(
        a.shape(), std::move(out), {a, b},
        [](detail::Node& self) {
            if (self.parents[0]->requires_grad)
                accumulate(*self.parents[0], self.grad);
            if (self.parents[1]->requires_grad) {
                auto& p = *self.parents[1];
                p.ensure_grad();
                for (std::size_t i = 0; i < self.grad.size(); ++i)
                    p.grad[i] -= self.grad[i];
            }
        },
        "sub");
}

Tensor mul(const Tensor& a, double s) {
    std::vector<double> out(a.size());
    auto av = a.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * s;
    return make_op(
        a.shape(), std::move(out), {a},
        [s](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                p.grad[i] += s * self.grad[i];
        },
        "mul");
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    std::vector<double> out(a.size());
    auto av = a.data(), bv = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
    return make_op(
        a.shape(), std::move(out), {a, b},
        [](detail::Node& self) {
            auto& pa = *self.parents[0];
            auto& pb = *self.parents[1];
            if (pa.requires_grad) {
                pa.ensure_grad();
                for (std::size_t i = 0; i < self.grad.size(); ++i)
                    pa.grad[i] += pb.value[i] * self.grad[i];
            }
            if (pb.requires_grad) {
                pb.ensure_grad();
                for (std::size_t i = 0; i < self.grad.size(); ++i)
                    pb.grad[i] += pa.value[i] * self.grad[i];
            }
        },
        "mul");
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
    require_rank(x, 2, "add_bias");
    require_rank(bias, 1, "add_bias");
    const std::size_t n = x.shape()[0], d = x.shape()[1];
    if (bias.shape()[0] != d)
        throw ConfigError("add_bias: bias extent " + shape_str(bias.shape()) +
                          " does not match " + shape_str(x.shape()));
    std::vector<double> out(x.size());
    auto xv = x.data(), bv = bias.data();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) out[i * d + j] = xv[i * d + j] + bv[j];
    return make_op(
        x.shape(), std::move(out), {x, bias},
        [n, d](detail::Node& self) {
            auto& px = *self.parents[0];
            auto& pb = *self.parents[1];
            if (px.requires_grad) accumulate(px, self.grad);
            if (pb.requires_grad) {
                pb.ensure_grad();
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < d; ++j)
                        pb.grad[j] += self.grad[i * d + j];
            }
        },
        "add_bias");
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank(a, 2, "matmul");
    require_rank(b, 2, "matmul");
    const std::size_t n = a.shape()[0], k = a.shape()[1], m = b.shape()[1];
    if (b.shape()[0] != k)
        throw ConfigError("matmul: " + shape_str(a.shape()) + " x " +
                          shape_str(b.shape()));
    std::vector<double> out(n * m, 0.0);
    auto av = a.data(), bv = b.data();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t kk = 0; kk < k; ++kk) {
            double aik = av[i * k + kk];
            const double* brow = &bv[kk * m];
            double* crow = &out[i * m];
            for (std::size_t j = 0; j < m; ++j) crow[j] += aik * brow[j];
        }
    return make_op(
        {n, m}, std::move(out), {a, b},
        [n, k, m](detail::Node& self) {
            auto& pa = *self.parents[0];
            auto& pb = *self.parents[1];
            if (pa.requires_grad) {
                pa.ensure_grad();
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t kk = 0; kk < k; ++kk) {
                        double s = 0.0;
                        const double* grow = &self.grad[i * m];
                        const double* brow = &pb.value[kk * m];
                        for (std::size_t j = 0; j < m; ++j) s += grow[j] * brow[j];
                        pa.grad[i * k + kk] += s;
                    }
            }
            if (pb.requires_grad) {
                pb.ensure_grad();
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t kk = 0; kk < k; ++kk) {
                        double aik = pa.value[i * k + kk];
                        const double* grow = &self.grad[i * m];
                        double* gbrow = &pb.grad[kk * m];
                        for (std::size_t j = 0; j < m; ++j) gbrow[j] += aik * grow[j];
                    }
            }
        },
        "matmul");
}

Tensor transpose(const Tensor& a) {
    require_rank(a, 2, "transpose");
    const std::size_t n = a.shape()[0], m = a.shape()[1];
    std::vector<double> out(n * m);
    auto av = a.data();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) out[j * n + i] = av[i * m + j];
    return make_op(
        {m, n}, std::move(out), {a},
        [n, m](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t i = 0; i < n; ++i)
                    p.grad[i * m + j] += self.grad[j * n + i];
        },
        "transpose");
}

Tensor reshape(const Tensor& a, Shape new_shape) {
    if (numel(new_shape) != a.size())
        throw ConfigError("reshape: " + shape_str(a.shape()) + " to " +
                          shape_str(new_shape));
    std::vector<double> out(a.data().begin(), a.data().end());
    return make_op(
        std::move(new_shape), std::move(out), {a},
        [](detail::Node& self) {
            if (self.parents[0]->requires_grad)
                accumulate(*self.parents[0], self.grad);
        },
        "reshape");
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
    if (parts.empty()) throw ConfigError("concat: no inputs");
    const Shape& s0 = parts[0].shape();
    if (axis >= s0.size())
        throw ConfigError("concat: axis out of range");
    std::size_t total = 0;
    for (const Tensor& p : parts) {
        if (p.rank() != s0.size())
            throw ConfigError("concat: rank mismatch");
        for (std::size_t i = 0; i < s0.size(); ++i)
            if (i != axis && p.shape()[i] != s0[i])
                throw ConfigError("concat: shape mismatch " +
                                  shape_str(p.shape()) + " vs " + shape_str(s0));
        total += p.shape()[axis];
    }
    Shape out_shape = s0;
    out_shape[axis] = total;
    Lanes lo = lanes_of(out_shape, axis);
    std::vector<double> out(numel(out_shape));
    std::vector<std::size_t> offsets;  // lane offset of each part
    std::size_t off = 0;
    for (const Tensor& p : parts) {
        offsets.push_back(off);
        Lanes lp = lanes_of(p.shape(), axis);
        auto pv = p.data();
        for (std::size_t o = 0; o < lp.outer; ++o)
            for (std::size_t l = 0; l < lp.lane; ++l)
                for (std::size_t i = 0; i < lp.inner; ++i)
                    out[(o * lo.lane + off + l) * lo.inner + i] =
                        pv[(o * lp.lane + l) * lp.inner + i];
        off += p.shape()[axis];
    }
    return make_op(
        std::move(out_shape), std::move(out), parts,
        [axis, lo, offsets](detail::Node& self) {
            for (std::size_t pi = 0; pi < self.parents.size(); ++pi) {
                auto& p = *self.parents[pi];
                if (!p.requires_grad) continue;
                p.ensure_grad();
                Lanes lp = lanes_of(p.shape, axis);
                std::size_t off = offsets[pi];
                for (std::size_t o = 0; o < lp.outer; ++o)
                    for (std::size_t l = 0; l < lp.lane; ++l)
                        for (std::size_t i = 0; i < lp.inner; ++i)
                            p.grad[(o * lp.lane + l) * lp.inner + i] +=
                                self.grad[(o * lo.lane + off + l) * lo.inner + i];
            }
        },
        "concat");
}

Tensor gather_rows(const Tensor& a, const std::vector<std::size_t>& rows) {
    require_rank(a, 2, "gather_rows");
    const std::size_t n = a.shape()[0], d = a.shape()[1];
    for (std::size_t r : rows)
        if (r >= n)
            throw ConfigError("gather_rows: row " + std::to_string(r) +
                              " out of range for " + shape_str(a.shape()));
    std::vector<double> out(rows.size() * d);
    auto av = a.data();
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy_n(&av[rows[i] * d], d, &out[i * d]);
    return make_op(
        {rows.size(), d}, std::move(out), {a},
        [rows, d](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = 0; j < d; ++j)
                    p.grad[rows[i] * d + j] += self.grad[i * d + j];
        },
        "gather_rows");
}

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count) {
    require_rank(a, 2, "slice_cols");
    const std::size_t n = a.shape()[0], m = a.shape()[1];
    if (start + count > m)
        throw ConfigError("slice_cols: range out of bounds");
    std::vector<double> out(n * count);
    auto av = a.data();
    for (std::size_t i = 0; i < n; ++i)
        std::copy_n(&av[i * m + start], count, &out[i * count]);
    return make_op(
        {n, count}, std::move(out), {a},
        [n, m, start, count](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < count; ++j)
                    p.grad[i * m + start + j] += self.grad[i * count + j];
        },
        "slice_cols");
}

// ---- nonlinearities and reductions ----

Tensor relu(const Tensor& a) {
    std::vector<double> out(a.size());
    auto av = a.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = av[i] > 0.0 ? av[i] : 0.0;
    return make_op(
        a.shape(), std::move(out), {a},
        [](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                if (p.value[i] > 0.0) p.grad[i] += self.grad[i];
        },
        "relu");
}

Tensor exp(const Tensor& a) {
    std::vector<double> out(a.size());
    auto av = a.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(av[i]);
    return make_op(
        a.shape(), std::move(out), {a},
        [](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                p.grad[i] += self.value[i] * self.grad[i];
        },
        "exp");
}

Tensor log(const Tensor& a) {
    std::vector<double> out(a.size());
    auto av = a.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(av[i]);
    return make_op(
        a.shape(), std::move(out), {a},
        [](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                p.grad[i] += self.grad[i] / p.value[i];
        },
        "log");
}

Tensor sum(const Tensor& a) {
    double s = 0.0;
    for (double v : a.data()) s += v;
    return make_op(
        {}, {s}, {a},
        [](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            double g = self.grad[0];
            for (std::size_t i = 0; i < p.grad.size(); ++i) p.grad[i] += g;
        },
        "sum");
}

Tensor broadcast_scalar(const Tensor& scalar, Shape shape) {
    if (scalar.size() != 1)
        throw ConfigError("broadcast_scalar: input must be a scalar");
    std::vector<double> out(numel(shape), scalar.at(0));
    return make_op(
        std::move(shape), std::move(out), {scalar},
        [](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            double s = 0.0;
            for (double g : self.grad) s += g;
            p.grad[0] += s;
        },
        "broadcast_scalar");
}

Tensor mean(const Tensor& a, std::size_t axis) {
    Lanes l = lanes_of(a.shape(), axis);
    if (l.lane == 0) throw ConfigError("mean: empty axis");
    Shape out_shape = a.shape();
    out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
    std::vector<double> out(l.outer * l.inner, 0.0);
    auto av = a.data();
    for (std::size_t o = 0; o < l.outer; ++o)
        for (std::size_t j = 0; j < l.lane; ++j)
            for (std::size_t i = 0; i < l.inner; ++i)
                out[o * l.inner + i] += av[(o * l.lane + j) * l.inner + i];
    double inv = 1.0 / static_cast<double>(l.lane);
    for (double& v : out) v *= inv;
    return make_op(
        std::move(out_shape), std::move(out), {a},
        [l, inv](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t o = 0; o < l.outer; ++o)
                for (std::size_t j = 0; j < l.lane; ++j)
                    for (std::size_t i = 0; i < l.inner; ++i)
                        p.grad[(o * l.lane + j) * l.inner + i] +=
                            inv * self.grad[o * l.inner + i];
        },
        "mean");
}

Tensor max_pool(const Tensor& a, std::size_t axis) {
    Lanes l = lanes_of(a.shape(), axis);
    if (l.lane == 0) throw ConfigError("max_pool: empty axis");
    Shape out_shape = a.shape();
    out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
    std::vector<double> out(l.outer * l.inner);
    std::vector<std::size_t> argmax(l.outer * l.inner);
    auto av = a.data();
    for (std::size_t o = 0; o < l.outer; ++o)
        for (std::size_t i = 0; i < l.inner; ++i) {
            double best = av[(o * l.lane) * l.inner + i];
            std::size_t bj = 0;
            for (std::size_t j = 1; j < l.lane; ++j) {
                double v = av[(o * l.lane + j) * l.inner + i];
                if (v > best) {
                    best = v;
                    bj = j;
                }
            }
            out[o * l.inner + i] = best;
            argmax[o * l.inner + i] = bj;
        }
    return make_op(
        std::move(out_shape), std::move(out), {a},
        [l, argmax](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t o = 0; o < l.outer; ++o)
                for (std::size_t i = 0; i < l.inner; ++i)
                    p.grad[(o * l.lane + argmax[o * l.inner + i]) * l.inner + i] +=
                        self.grad[o * l.inner + i];
        },
        "max_pool");
}

Tensor softmax(const Tensor& a, std::size_t axis) {
    Lanes l = lanes_of(a.shape(), axis);
    if (l.lane == 0) throw ConfigError("softmax: empty axis");
    std::vector<double> out(a.size());
    auto av = a.data();
    for (std::size_t o = 0; o < l.outer; ++o)
        for (std::size_t i = 0; i < l.inner; ++i) {
            double m = av[(o * l.lane) * l.inner + i];
            for (std::size_t j = 1; j < l.lane; ++j)
                m = std::max(m, av[(o * l.lane + j) * l.inner + i]);
            double s = 0.0;
            for (std::size_t j = 0; j < l.lane; ++j) {
                double e = std::exp(av[(o * l.lane + j) * l.inner + i] - m);
                out[(o * l.lane + j) * l.inner + i] = e;
                s += e;
            }
            double inv = 1.0 / s;
            for (std::size_t j = 0; j < l.lane; ++j)
                out[(o * l.lane + j) * l.inner + i] *= inv;
        }
    return make_op(
        a.shape(), std::move(out), {a},
        [l](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t o = 0; o < l.outer; ++o)
                for (std::size_t i = 0; i < l.inner; ++i) {
                    double dot = 0.0;
                    for (std::size_t j = 0; j < l.lane; ++j) {
                        std::size_t at = (o * l.lane + j) * l.inner + i;
                        dot += self.grad[at] * self.value[at];
                    }
                    for (std::size_t j = 0; j < l.lane; ++j) {
                        std::size_t at = (o * l.lane + j) * l.inner + i;
                        p.grad[at] += self.value[at] * (self.grad[at] - dot);
                    }
                }
        },
        "softmax");
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps) {
    if (x.rank() < 1) throw ConfigError("layer_norm: rank must be >= 1");
    if (!(eps > 0.0)) throw ConfigError("layer_norm: eps must be positive");
    const std::size_t d = x.shape().back();
    require_rank(gain, 1, "layer_norm");
    require_rank(bias, 1, "layer_norm");
    if (gain.shape()[0] != d || bias.shape()[0] != d)
        throw ConfigError("layer_norm: gain/bias extent must match last axis");
    const std::size_t rows = x.size() / d;
    std::vector<double> out(x.size());
    std::vector<double> invstd(rows), mu(rows);
    auto xv = x.data();
    auto gv = gain.data();
    auto bv = bias.data();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = &xv[r * d];
        double m = 0.0;
        for (std::size_t j = 0; j < d; ++j) m += row[j];
        m /= static_cast<double>(d);
        double var = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double t = row[j] - m;
            var += t * t;
        }
        var /= static_cast<double>(d);
        double inv = 1.0 / std::sqrt(var + eps);
        mu[r] = m;
        invstd[r] = inv;
        for (std::size_t j = 0; j < d; ++j)
            out[r * d + j] = (row[j] - m) * inv * gv[j] + bv[j];
    }
    return make_op(
        x.shape(), std::move(out), {x, gain, bias},
        [rows, d, mu, invstd](detail::Node& self) {
            auto& px = *self.parents[0];
            auto& pg = *self.parents[1];
            auto& pb = *self.parents[2];
            for (std::size_t r = 0; r < rows; ++r) {
                const double* xrow = &px.value[r * d];
                const double* grow = &self.grad[r * d];
                double inv = invstd[r], m = mu[r];
                // xhat and the two per-row sums the input gradient needs
                double sum_gxh = 0.0, sum_gxh_xh = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    double xh = (xrow[j] - m) * inv;
                    double gxh = grow[j] * pg.value[j];
                    sum_gxh += gxh;
                    sum_gxh_xh += gxh * xh;
                }
                double invd = 1.0 / static_cast<double>(d);
                if (px.requires_grad) {
                    px.ensure_grad();
                    for (std::size_t j = 0; j < d; ++j) {
                        double xh = (xrow[j] - m) * inv;
                        double gxh = grow[j] * pg.value[j];
                        px.grad[r * d + j] +=
                            inv * (gxh - invd * sum_gxh - xh * invd * sum_gxh_xh);
                    }
                }
                if (pg.requires_grad) {
                    pg.ensure_grad();
                    for (std::size_t j = 0; j < d; ++j)
                        pg.grad[j] += grow[j] * (xrow[j] - m) * inv;
                }
                if (pb.requires_grad) {
                    pb.ensure_grad();
                    for (std::size_t j = 0; j < d; ++j) pb.grad[j] += grow[j];
                }
            }
        },
        "layer_norm");
}

Tensor l2_normalize(const Tensor& a, std::size_t axis, double eps) {
    if (!(eps > 0.0)) throw ConfigError("l2_normalize: eps must be positive");
    Lanes l = lanes_of(a.shape(), axis);
    std::vector<double> out(a.size());
    std::vector<double> norms(l.outer * l.inner);
    auto av = a.data();
    for (std::size_t o = 0; o < l.outer; ++o)
        for (std::size_t i = 0; i < l.inner; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < l.lane; ++j) {
                double v = av[(o * l.lane + j) * l.inner + i];
                s += v * v;
            }
            double n = std::sqrt(s);
            norms[o * l.inner + i] = n;
            double denom = std::max(n, eps);
            for (std::size_t j = 0; j < l.lane; ++j)
                out[(o * l.lane + j) * l.inner + i] =
                    av[(o * l.lane + j) * l.inner + i] / denom;
        }
    return make_op(
        a.shape(), std::move(out), {a},
        [l, norms, eps](detail::Node& self) {
            auto& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            for (std::size_t o = 0; o < l.outer; ++o)
                for (std::size_t i = 0; i < l.inner; ++i) {
                    double n = norms[o * l.inner + i];
                    if (n > eps) {
                        double gy = 0.0;
                        for (std::size_t j = 0; j < l.lane; ++j) {
                            std::size_t at = (o * l.lane + j) * l.inner + i;
                            gy += self.grad[at] * self.value[at];
                        }
                        for (std::size_t j = 0; j < l.lane; ++j) {
                            std::size_t at = (o * l.lane + j) * l.inner + i;
                            p.grad[at] +=
                                (self.grad[at] - self.value[at] * gy) / n;
                        }
                    } else {
                        for (std::size_t j = 0; j < l.lane; ++j) {
                            std::size_t at = (o * l.lane + j) * l.inner + i;
                            p.grad[at] += self.grad[at] / eps;
                        }
                    }
                }
        },
        "l2_normalize");
}

Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v,
                 std::size_t heads) {
    require_rank(q, 2, "attention");
    require_same_shape(q, k, "attention");
    require_same_shape(q, v, "attention");
    const std::size_t d = q.shape()[1];
    if (heads == 0 || d % heads != 0)
        throw ConfigError("attention: model dim " + std::to_string(d) +
                          " not divisible by " + std::to_string(heads) +
                          " heads");
    const std::size_t dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    std::vector<Tensor> outs;
    outs.reserve(heads);
    for (std::size_t h = 0; h < heads; ++h) {
        Tensor qh = slice_cols(q, h * dh, dh);
        Tensor kh = slice_cols(k, h * dh, dh);
        Tensor vh = slice_cols(v, h * dh, dh);
        Tensor scores = mul(matmul(qh, transpose(kh)), scale);
        Tensor weights = softmax(scores, 1);
        outs.push_back(matmul(weights, vh));
    }
    return heads == 1 ? outs[0] : concat(outs, 1);
}

// ---- backward ----

Tape::Tape(const Tensor& root) : root_(root.node()) {
    if (!root_) throw ConfigError("Tape: undefined tensor");
    if (!root_->requires_grad)
        throw ConfigError("backward on a graph with no gradient-tracked inputs");
    struct Frame {
        detail::Node* node;
        std::size_t next_parent;
    };
    std::unordered_set<detail::Node*> seen;
    std::stack<Frame> stack;
    stack.push({root_.get(), 0});
    seen.insert(root_.get());
    while (!stack.empty()) {
        Frame& f = stack.top();
        if (f.next_parent < f.node->parents.size()) {
            detail::Node* p = f.node->parents[f.next_parent++].get();
            if (p->requires_grad && !seen.count(p)) {
                seen.insert(p);
                stack.push({p, 0});
            }
        } else {
            order_.push_back(f.node);
            stack.pop();
        }
    }
}

void Tape::backward() {
    root_->ensure_grad();
    root_->grad[0] += 1.0;
    for (std::size_t i = order_.size(); i-- > 0;) {
        detail::Node* n = order_[i];
        if (!n->backward_fn) continue;
        for (auto& p : n->parents)
            if (p->requires_grad) p->ensure_grad();
        n->backward_fn(*n);
    }
}

void backward(const Tensor& loss) {
    if (loss.size() != 1)
        throw ConfigError("backward: loss must be a scalar, got shape " +
                          shape_str(loss.shape()));
    Tape tape(loss);
    tape.backward();
}

double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor& x,
                  double h) {
    if (!(h > 0.0)) throw ConfigError("grad_check: h must be positive");
    if (!x.requires_grad())
        throw ConfigError("grad_check: x must require gradients");
    x.zero_grad();
    Tensor y = f(x);
    if (y.size() != 1)
        throw ConfigError("grad_check: f must return a scalar");
    backward(y);
    std::vector<double> analytic(x.grad().begin(), x.grad().end());

    double max_rel = 0.0;
    {
        NoGradGuard ng;
        auto xd = x.mutable_data();
        for (std::size_t i = 0; i < xd.size(); ++i) {
            double orig = xd[i];
            xd[i] = orig + h;
            double yp = f(x).scalar();
            xd[i] = orig - h;
            double ym = f(x).scalar();
            xd[i] = orig;
            double numeric = (yp - ym) / (2.0 * h);
            // Floor keeps finite-difference noise on near-zero entries from
            // masquerading as relative error; real defects are O(1).
            double denom =
                std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-4});
            max_rel = std::max(max_rel, std::fabs(analytic[i] - numeric) / denom);
        }
    }
    return max_rel;
}

}  // namespace c2p::ag
