// Barnes-Hut treecode for the blob kernel.
//
// Each quadtree node stores Cartesian moments M_k = sum_i w_i (c - y_i)^k of
// its particles about the node center c. The far field of the node at
// z = x - c is the Taylor series of K_delta in powers of (c - y_i):
//
//   f(z) = 1 / (|z|^2 + delta^2),   a_k = D^k f(z) / k!
//   |k| R a_k = -2|k| sum_i z_i a_{k-e_i} - |k| sum_i a_{k-2e_i}
//
// and z_1 f, z_2 f have coefficients z_1 a_k + a_{k-e_1}, z_2 a_k + a_{k-e_2}.

#include <array>
#include <cmath>
#include <stdexcept>

#include "kernel_detail.hpp"
#include "vortexlab/kernel.hpp"

namespace vortexlab::kernel {

namespace {

constexpr int kMaxDepth = 48;
constexpr int kMaxOrder = 20;
// Coefficients live on a (k1, k2) grid with two rows and columns of zero
// padding, so a_{k - e_i} and a_{k - 2 e_i} need no bounds checks.
constexpr int kPad = 2;
constexpr int kStride = kMaxOrder + 1 + kPad;

constexpr int grid_index(int k1, int k2) { return (k1 + kPad) * kStride + (k2 + kPad); }

struct Node {
  double cx = 0.0, cy = 0.0, radius = 0.0;
  int begin = 0, end = 0;
  std::array<int, 4> child{-1, -1, -1, -1};
  bool leaf = true;
  std::size_t moments = 0;  // offset into Tree::moments
};

class Tree {
 public:
  Tree(const SourceView& s, const TreecodeParams& params) : order_(params.expansion_order) {
    const auto n = static_cast<int>(s.size());
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;

    double x0 = s.x[0], x1 = s.x[0], y0 = s.y[0], y1 = s.y[0];
    for (int i = 1; i < n; ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
    const double half = 0.5 * std::max(x1 - x0, y1 - y0);
    build(s, idx, 0, n, 0.5 * (x0 + x1), 0.5 * (y0 + y1), half, 0, params.max_leaf_size);

    x_.resize(n);
    y_.resize(n);
    w_.resize(n);
    for (int i = 0; i < n; ++i) {
      x_[i] = s.x[idx[i]];
      y_[i] = s.y[idx[i]];
      w_[i] = s.w[idx[i]];
    }
    for (auto& node : nodes_) finish_node(node);
  }

  // Adds the (unscaled) contribution of every source to acc.
  void evaluate(double tx, double ty, double delta2, double theta2, detail::Accum& acc) const {
    std::array<int, 4 * kMaxDepth + 4> stack;
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      if (node.leaf) {
        detail::accumulate(&x_[node.begin], &y_[node.begin], &w_[node.begin],
                           static_cast<std::size_t>(node.end - node.begin), tx, ty, delta2, acc);
        continue;
      }
      const double zx = tx - node.cx;
      const double zy = ty - node.cy;
      const double dist2 = zx * zx + zy * zy;
      if (node.radius * node.radius < theta2 * dist2) {
        expand(node, zx, zy, delta2, acc);
        continue;
      }
      // Push in reverse so children are visited in quadrant order.
      for (int c = 3; c >= 0; --c)
        if (node.child[c] >= 0) stack[top++] = node.child[c];
    }
  }

 private:
  int build(const SourceView& s, std::vector<int>& idx, int begin, int end, double bx, double by,
            double half, int depth, int leaf_size) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{});
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= leaf_size || depth >= kMaxDepth) return id;

    // Stable partition into quadrants keeps index order inside every leaf.
    std::array<std::vector<int>, 4> bucket;
    for (int i = begin; i < end; ++i) {
      const int p = idx[i];
      const int q = (s.x[p] >= bx ? 1 : 0) + (s.y[p] >= by ? 2 : 0);
      bucket[q].push_back(p);
    }
    nodes_[id].leaf = false;
    int cursor = begin;
    const double h = 0.5 * half;
    for (int q = 0; q < 4; ++q) {
      if (bucket[q].empty()) continue;
      const int b = cursor;
      for (int p : bucket[q]) idx[cursor++] = p;
      const double cx = bx + ((q & 1) ? h : -h);
      const double cy = by + ((q & 2) ? h : -h);
      const int child = build(s, idx, b, cursor, cx, cy, h, depth + 1, leaf_size);
      nodes_[id].child[q] = child;
    }
    return id;
  }

  void finish_node(Node& node) {
    double aw = 0.0, sx = 0.0, sy = 0.0;
    for (int i = node.begin; i < node.end; ++i) {
      const double a = std::abs(w_[i]);
      aw += a;
      sx += a * x_[i];
      sy += a * y_[i];
    }
    if (aw > 0.0) {
      node.cx = sx / aw;
      node.cy = sy / aw;
    } else {
      for (int i = node.begin; i < node.end; ++i) {
        node.cx += x_[i];
        node.cy += y_[i];
      }
      node.cx /= (node.end - node.begin);
      node.cy /= (node.end - node.begin);
    }
    double r2 = 0.0;
    for (int i = node.begin; i < node.end; ++i) {
      const double dx = x_[i] - node.cx, dy = y_[i] - node.cy;
      r2 = std::max(r2, dx * dx + dy * dy);
    }
    node.radius = std::sqrt(r2);
    if (node.leaf) return;

    node.moments = moments_.size();
    moments_.resize(moments_.size() + static_cast<std::size_t>((order_ + 1) * (order_ + 1)), 0.0);
    double* m = &moments_[node.moments];
    std::array<double, kMaxOrder + 1> px, py;
    for (int i = node.begin; i < node.end; ++i) {
      const double hx = node.cx - x_[i], hy = node.cy - y_[i];
      px[0] = py[0] = 1.0;
      for (int k = 1; k <= order_; ++k) {
        px[k] = px[k - 1] * hx;
        py[k] = py[k - 1] * hy;
      }
      for (int k1 = 0; k1 <= order_; ++k1)
        for (int k2 = 0; k1 + k2 <= order_; ++k2)
          m[k1 * (order_ + 1) + k2] += w_[i] * px[k1] * py[k2];
    }
  }

  void expand(const Node& node, double zx, double zy, double delta2, detail::Accum& acc) const {
    const int p = order_;
    std::array<double, kStride * kStride> a;
    for (int r = 0; r < kPad; ++r)
      for (int c = 0; c < p + 1 + kPad; ++c) {
        a[r * kStride + c] = 0.0;
        a[c * kStride + r] = 0.0;
      }
    const double inv = 1.0 / (zx * zx + zy * zy + delta2);
    const double tx = 2.0 * zx, ty = 2.0 * zy;
    a[grid_index(0, 0)] = inv;
    for (int n = 1; n <= p; ++n)
      for (int k2 = 0; k2 <= n; ++k2) {
        const int k1 = n - k2;
        const double s = tx * a[grid_index(k1 - 1, k2)] + ty * a[grid_index(k1, k2 - 1)] +
                         a[grid_index(k1 - 2, k2)] + a[grid_index(k1, k2 - 2)];
        a[grid_index(k1, k2)] = -s * inv;
      }

    const double* m = &moments_[node.moments];
    double sx = 0.0, sy = 0.0;
    for (int k1 = 0; k1 <= p; ++k1)
      for (int k2 = 0; k1 + k2 <= p; ++k2) {
        const double ak = a[grid_index(k1, k2)];
        const double b1 = zx * ak + a[grid_index(k1 - 1, k2)];
        const double b2 = zy * ak + a[grid_index(k1, k2 - 1)];
        const double mk = m[k1 * (p + 1) + k2];
        sx -= b2 * mk;
        sy += b1 * mk;
      }
    acc.sx += sx;
    acc.sy += sy;
  }

  int order_;
  std::vector<Node> nodes_;
  std::vector<double> x_, y_, w_;
  std::vector<double> moments_;
};

}  // namespace

std::vector<PlaneVector> velocity_tree(const SourceView& sources,
                                       std::span<const PlaneVector> targets,
                                       const BlobSpec& spec, const TreecodeParams& params,
                                       Exec exec) {
  spec.validate();
  params.validate();
  if (spec.mode != KernelMode::Blob)
    throw std::domain_error("velocity_tree: the treecode supports the blob kernel only");
  if (sources.x.size() != sources.w.size() || sources.y.size() != sources.w.size())
    throw std::invalid_argument("SourceView: coordinate and weight spans differ in length");

  std::vector<PlaneVector> out(targets.size());
  if (sources.size() == 0) return out;

  const Tree tree(sources, params);
  const double delta2 = spec.delta2();
  const double theta2 = params.opening_angle * params.opening_angle;
  const auto m = static_cast<long>(targets.size());

#pragma omp parallel for schedule(dynamic, 64) if (exec == Exec::Parallel)
  for (long j = 0; j < m; ++j) {
    detail::Accum acc;
    tree.evaluate(targets[j].x, targets[j].y, delta2, theta2, acc);
    out[j] = {kInv2Pi * acc.sx, kInv2Pi * acc.sy};
  }
  for (const auto& u : out)
    if (!u.finite()) throw std::domain_error("velocity_tree: non-finite velocity");
  return out;
}

}  // namespace vortexlab::kernel
