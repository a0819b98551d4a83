#pragma once

#include <cstddef>
#include <vector>

#include "walkspec/graph_models.hpp"

namespace walkspec::oracle {

// p^(k)(o,o) for k = 0..n by dense matrix powering of the kernel restricted to B(ceil(n/2)).
// A path that returns to o by step n never leaves that ball, so the values are exact.
std::vector<double> dense_return_probabilities(const GraphModel& model, double lambda, std::size_t n,
                                               std::size_t cap = 20000);

// Distribution of X_k for k = 0..n, propagated vertex by vertex on B(n) and lumped onto
// (level, type) classes: result[k][level][type].
std::vector<std::vector<std::vector<double>>> lumped_distribution(const GraphModel& model, double lambda,
                                                                  std::size_t n);

// Same lumped distributions from the quotient chain.
std::vector<std::vector<std::vector<double>>> quotient_distribution(const GraphModel& model, double lambda,
                                                                    std::size_t n);

// max over edges of B(radius) of |mu(x)p(x,y) - mu(y)p(y,x)| / max(mu(x)p(x,y), mu(y)p(y,x)).
double detailed_balance_error(const GraphModel& model, double lambda, std::size_t radius);

}  // namespace walkspec::oracle
