#include "rgs/knn.hpp"

#include <algorithm>
#include <cmath>

#include "rgs/parallel.hpp"

namespace rgs {

namespace {
constexpr int kLeafSize = 16;
}

struct KdTree4::Candidate {
    Scalar dist2;
    int idx;
    bool operator<(const Candidate& o) const {
        if (dist2 != o.dist2) return dist2 < o.dist2;
        return idx < o.idx;
    }
};

KdTree4::KdTree4(std::vector<Vec4> points) : pts_(std::move(points)) {
    order_.resize(pts_.size());
    for (size_t i = 0; i < pts_.size(); ++i) order_[i] = (int)i;
    if (!pts_.empty()) root_ = build(0, (int)pts_.size());
}

int KdTree4::build(int begin, int end) {
    Node node;
    if (end - begin <= kLeafSize) {
        node.begin = begin;
        node.end = end;
        nodes_.push_back(node);
        return (int)nodes_.size() - 1;
    }
    // Split on the widest axis at the median.
    Vec4 lo = pts_[order_[begin]], hi = lo;
    for (int i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(pts_[order_[i]]);
        hi = hi.cwiseMax(pts_[order_[i]]);
    }
    int axis;
    (hi - lo).maxCoeff(&axis);
    int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return pts_[a][axis] < pts_[b][axis]; });
    node.axis = axis;
    node.split = pts_[order_[mid]][axis];
    int self = (int)nodes_.size();
    nodes_.push_back(node);
    int left = build(begin, mid);
    int right = build(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

std::vector<int> KdTree4::knn(const Vec4& q, int k, int exclude_idx) const {
    if (k <= 0 || pts_.empty()) return {};
    // Max-heap of the best k candidates seen so far.
    std::vector<Candidate> heap;
    heap.reserve(k + 1);
    auto worse = [](const Candidate& a, const Candidate& b) { return a < b; };

    auto consider = [&](int idx) {
        if (idx == exclude_idx) return;
        Candidate c{(pts_[idx] - q).squaredNorm(), idx};
        if ((int)heap.size() < k) {
            heap.push_back(c);
            std::push_heap(heap.begin(), heap.end(), worse);
        } else if (c < heap.front()) {
            std::pop_heap(heap.begin(), heap.end(), worse);
            heap.back() = c;
            std::push_heap(heap.begin(), heap.end(), worse);
        }
    };

    // Recursive descent, nearer child first, pruning on the splitting
    // plane distance against the current worst candidate.
    auto visit = [&](auto&& self, int node_idx) -> void {
        const Node& node = nodes_[node_idx];
        if (node.axis < 0) {
            for (int i = node.begin; i < node.end; ++i) consider(order_[i]);
            return;
        }
        Scalar delta = q[node.axis] - node.split;
        int near = delta < 0 ? node.left : node.right;
        int far = delta < 0 ? node.right : node.left;
        self(self, near);
        if ((int)heap.size() < k || delta * delta <= heap.front().dist2) self(self, far);
    };
    visit(visit, root_);

    std::sort(heap.begin(), heap.end());
    std::vector<int> out(heap.size());
    for (size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].idx;
    return out;
}

Knn4DIndex build_knn4d(const GaussianStore& store, int k, const Vec4& scene_scales,
                       int threads) {
    int n = store.size();
    if (n <= k) throw TooFewPointsError();
    std::vector<Vec4> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = store.mean[i].cwiseQuotient(scene_scales);
    KdTree4 tree(pts);

    Knn4DIndex index;
    index.scene_scales = scene_scales;
    index.k = k;
    index.store_size = n;
    index.neighbors.resize(n);
    parallel_for(0, n, threads, [&](int i) { index.neighbors[i] = tree.knn(pts[i], k, i); });
    return index;
}

}  // namespace rgs
