#pragma once

#include <stdexcept>
#include <vector>

#include "rgs/gaussian.hpp"
#include "rgs/types.hpp"

namespace rgs {

struct TooFewPointsError : std::runtime_error {
    TooFewPointsError() : std::runtime_error("knn: need more points than neighbors") {}
};
struct StaleIndexError : std::runtime_error {
    StaleIndexError() : std::runtime_error("knn index stale: store size changed since build") {}
};

/// Exact k-nearest-neighbor search over 4D points. Ties are broken by
/// point index so results match a brute-force scan exactly.
class KdTree4 {
public:
    explicit KdTree4(std::vector<Vec4> points);

    // k nearest to q, excluding exclude_idx, sorted by (distance, index).
    std::vector<int> knn(const Vec4& q, int k, int exclude_idx = -1) const;

private:
    struct Node {
        int axis = -1;       // -1 marks a leaf
        Scalar split = 0;
        int begin = 0, end = 0;  // leaf range into order_
        int left = -1, right = -1;
    };
    struct Candidate;

    int build(int begin, int end);
    std::vector<Vec4> pts_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

struct Knn4DIndex {
    Vec4 scene_scales = Vec4::Ones();
    int k = 0;
    int store_size = 0;
    std::vector<std::vector<int>> neighbors;  // per Gaussian, distance-ascending
};

// Neighbors under Euclidean distance on coordinates divided by the scene
// scales (x/Sx, y/Sy, z/Sz, t/St).
Knn4DIndex build_knn4d(const GaussianStore& store, int k, const Vec4& scene_scales,
                       int threads = 1);

}  // namespace rgs
