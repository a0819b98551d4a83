#include "walkspec/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "walkspec/error.hpp"
#include "walkspec/kernel.hpp"

namespace walkspec::oracle {

namespace {

double edge_probability(const GraphModel& model, double lambda, const VertexAddr& from, int delta) {
    const ClassProbabilities p = class_probabilities(model, lambda, from.level(), from.type());
    return delta < 0 ? p.down : (delta == 0 ? p.lateral : p.up);
}

using Lumped = std::vector<std::vector<double>>;

Lumped empty_lumped(const GraphModel& model, std::size_t n) {
    return Lumped(n + 1, std::vector<double>(static_cast<std::size_t>(model.type_count()) + 1, 0.0));
}

}  // namespace

std::vector<double> dense_return_probabilities(const GraphModel& model, double lambda, std::size_t n,
                                               std::size_t cap) {
    const Ball ball = enumerate_ball(model, (n + 1) / 2, cap);
    const auto size = static_cast<Eigen::Index>(ball.vertices.size());
    Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(size, size);
    for (std::size_t i = 0; i < ball.vertices.size(); ++i) {
        for (const auto& [j, delta] : ball.adjacency[i]) {
            kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                edge_probability(model, lambda, ball.vertices[i], delta);
        }
    }
    std::vector<double> out(n + 1);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(size, size);
    out[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        power = power * kernel;
        out[k] = power(0, 0);
    }
    return out;
}

std::vector<Lumped> lumped_distribution(const GraphModel& model, double lambda, std::size_t n) {
    const Ball ball = enumerate_ball(model, n);
    std::vector<double> cur(ball.vertices.size(), 0.0);
    std::vector<double> nxt(cur.size());
    cur[0] = 1.0;
    std::vector<Lumped> out;
    auto lump = [&](const std::vector<double>& dist) {
        Lumped l = empty_lumped(model, n);
        for (std::size_t i = 0; i < dist.size(); ++i) {
            const VertexAddr& v = ball.vertices[i];
            l[v.level()][static_cast<std::size_t>(v.type())] += dist[i];
        }
        return l;
    };
    out.push_back(lump(cur));
    for (std::size_t k = 1; k <= n; ++k) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (cur[i] == 0.0) continue;
            for (const auto& [j, delta] : ball.adjacency[i]) {
                nxt[j] += cur[i] * edge_probability(model, lambda, ball.vertices[i], delta);
            }
        }
        std::swap(cur, nxt);
        out.push_back(lump(cur));
    }
    return out;
}

std::vector<Lumped> quotient_distribution(const GraphModel& model, double lambda, std::size_t n) {
    const QuotientChain chain(model, lambda);
    std::vector<Lumped> out;
    Lumped cur = empty_lumped(model, n);
    cur[0][0] = 1.0;
    out.push_back(cur);
    for (std::size_t k = 1; k <= n; ++k) {
        Lumped nxt = empty_lumped(model, n);
        for (std::size_t level = 0; level <= n; ++level) {
            for (std::size_t t = 0; t < cur[level].size(); ++t) {
                const double w = cur[level][t];
                if (w == 0.0) continue;
                for (const auto& e : chain.row({level, static_cast<int>(t)})) {
                    if (e.target.level > n) continue;
                    nxt[e.target.level][static_cast<std::size_t>(e.target.type)] += w * e.probability;
                }
            }
        }
        cur = std::move(nxt);
        out.push_back(cur);
    }
    return out;
}

double detailed_balance_error(const GraphModel& model, double lambda, std::size_t radius) {
    const Ball ball = enumerate_ball(model, radius);
    double worst = 0.0;
    for (std::size_t i = 0; i < ball.vertices.size(); ++i) {
        const VertexAddr& x = ball.vertices[i];
        const double mx = stationary_weight(model, lambda, x);
        for (const auto& [j, delta] : ball.adjacency[i]) {
            const VertexAddr& y = ball.vertices[j];
            const double forward = mx * edge_probability(model, lambda, x, delta);
            const double backward = stationary_weight(model, lambda, y) * edge_probability(model, lambda, y, -delta);
            const double scale = std::max(forward, backward);
            if (scale > 0.0) worst = std::max(worst, std::abs(forward - backward) / scale);
        }
    }
    return worst;
}

}  // namespace walkspec::oracle
