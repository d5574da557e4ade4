#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wqad {

/// Exact k-nearest-neighbour search under Euclidean distance.
/// Points are rows of a row-major matrix; the tree keeps a view, so the data must outlive it.
class KdTree {
public:
    KdTree(std::span<const double> data, std::size_t dim, std::size_t leaf_size = 8);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

    struct Neighbour {
        std::size_t index;
        double distance;
    };

    /// The k nearest rows to row `self`, excluding `self`, sorted by distance then index.
    [[nodiscard]] std::vector<Neighbour> nearest_to_row(std::size_t self, std::size_t k) const;

    /// The k nearest rows to an arbitrary point (which must have dim() coordinates).
    [[nodiscard]] std::vector<Neighbour> nearest(std::span<const double> point, std::size_t k) const;

private:
    struct Node {
        std::size_t begin, end;   // range in order_
        std::size_t axis = 0;
        double split = 0.0;
        int left = -1, right = -1;
    };

    int build(std::size_t begin, std::size_t end);
    void search(int node, std::span<const double> point, std::size_t exclude, std::size_t k,
                std::vector<std::pair<double, std::size_t>>& heap) const;
    [[nodiscard]] double squared_distance(std::span<const double> point, std::size_t row) const;

    std::span<const double> data_;
    std::size_t dim_;
    std::size_t n_;
    std::size_t leaf_size_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace wqad
