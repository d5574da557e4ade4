#include "wqad/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "wqad/error.hpp"

namespace wqad {

KdTree::KdTree(std::span<const double> data, std::size_t dim, std::size_t leaf_size)
    : data_(data), dim_(dim), n_(dim == 0 ? 0 : data.size() / dim), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
    if (dim == 0 || data.size() % dim != 0) {
        throw Error(ErrorCode::InvalidConfig,
                    fmt::format("kd-tree data of size {} is not a multiple of dimension {}", data.size(), dim));
    }
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (n_ > 0) build(0, n_);
}

int KdTree::build(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= leaf_size_) return id;

    // Split on the axis with the widest spread.
    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = begin; i < end; ++i) {
            const double v = data_[order_[i] * dim_ + a];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            axis = a;
        }
    }
    if (widest <= 0.0) return id;  // all points coincide

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                         const double va = data_[a * dim_ + axis];
                         const double vb = data_[b * dim_ + axis];
                         return va < vb || (va == vb && a < b);
                     });
    const double split = data_[order_[mid] * dim_ + axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[static_cast<std::size_t>(id)].axis = axis;
    nodes_[static_cast<std::size_t>(id)].split = split;
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
}

double KdTree::squared_distance(std::span<const double> point, std::size_t row) const {
    double acc = 0.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        const double diff = point[a] - data_[row * dim_ + a];
        acc += diff * diff;
    }
    return acc;
}

void KdTree::search(int node_id, std::span<const double> point, std::size_t exclude, std::size_t k,
                    std::vector<std::pair<double, std::size_t>>& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.left < 0) {
        for (std::size_t i = node.begin; i < node.end; ++i) {
            const std::size_t row = order_[i];
            if (row == exclude) continue;
            const std::pair<double, std::size_t> cand{squared_distance(point, row), row};
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end());
            } else if (cand < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        return;
    }
    const double diff = point[node.axis] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search(near, point, exclude, k, heap);
    if (heap.size() < k || diff * diff <= heap.front().first) search(far, point, exclude, k, heap);
}

std::vector<KdTree::Neighbour> KdTree::nearest(std::span<const double> point, std::size_t k) const {
    if (point.size() != dim_) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("query point has {} coordinates, tree has {}",
                                                          point.size(), dim_));
    }
    std::vector<std::pair<double, std::size_t>> heap;
    if (k > 0 && n_ > 0) search(0, point, n_, k, heap);
    std::sort_heap(heap.begin(), heap.end());
    std::vector<Neighbour> out;
    out.reserve(heap.size());
    for (const auto& [d2, row] : heap) out.push_back({row, std::sqrt(d2)});
    return out;
}

std::vector<KdTree::Neighbour> KdTree::nearest_to_row(std::size_t self, std::size_t k) const {
    std::vector<std::pair<double, std::size_t>> heap;
    if (k > 0 && n_ > 0) search(0, data_.subspan(self * dim_, dim_), self, k, heap);
    std::sort_heap(heap.begin(), heap.end());
    std::vector<Neighbour> out;
    out.reserve(heap.size());
    for (const auto& [d2, row] : heap) out.push_back({row, std::sqrt(d2)});
    return out;
}

}  // namespace wqad
