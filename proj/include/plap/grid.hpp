#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace plap {

struct GridPolicy {
    double r_min = 1e-6;  // innermost node
    int count = 4096;     // total node count
    double max_ratio = 1.05;
};

// Radial grid on (0, 1]: geometric refinement toward the origin (log-spaced
// nodes), last node exactly 1.  The default policy leaves > 200 nodes on
// [1/2, 1].
class RadialGrid {
public:
    RadialGrid() = default;

    explicit RadialGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) { validate(); }

    static RadialGrid standard(const GridPolicy& pol = {}) {
        const double ratio = std::pow(1.0 / pol.r_min, 1.0 / (pol.count - 1));
        if (ratio > pol.max_ratio)
            throw std::domain_error("grid: geometric ratio exceeds policy cap");
        return logspaced(pol.r_min, pol.count);
    }

    static RadialGrid logspaced(double r_min, int count) {
        if (!(r_min > 0.0 && r_min < 1.0)) throw std::domain_error("grid: r_min in (0,1)");
        if (count < 2) throw std::domain_error("grid: count >= 2");
        std::vector<double> nodes(count);
        const double lr = std::log(r_min);
        for (int i = 0; i < count; ++i)
            nodes[i] = std::exp(lr * (1.0 - static_cast<double>(i) / (count - 1)));
        nodes.back() = 1.0;
        return RadialGrid(std::move(nodes));
    }

    // Union with extra nodes (sorted, deduplicated); keeps the endpoints.
    RadialGrid refined_with(std::span<const double> extra) const {
        std::vector<double> nodes(nodes_);
        for (double r : extra)
            if (r > 0.0 && r <= 1.0) nodes.push_back(r);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end(),
                                [](double a, double b) { return std::fabs(a - b) < 1e-15 * b; }),
                    nodes.end());
        return RadialGrid(std::move(nodes));
    }

    const std::vector<double>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double r_min() const { return nodes_.front(); }

    std::size_t index_at_or_above(double r) const {
        const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), r);
        return static_cast<std::size_t>(it - nodes_.begin());
    }

private:
    void validate() const {
        if (nodes_.size() < 2) throw std::domain_error("grid: need >= 2 nodes");
        if (!(nodes_.front() > 0.0)) throw std::domain_error("grid: r_min must be positive");
        if (nodes_.back() != 1.0) throw std::domain_error("grid: last node must equal 1");
        for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
            if (!(nodes_[i] < nodes_[i + 1]))
                throw std::domain_error("grid: nodes must increase strictly");
    }

    std::vector<double> nodes_;
};

}  // namespace plap
