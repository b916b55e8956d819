#pragma once

#include <vector>

namespace scbicm {

// Gauss-Hermite rule for integrals of f(t) * exp(-t^2) over the real line
// (physicists' convention).  Nodes ascend; weights are all positive and sum
// to sqrt(pi).
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

HermiteRule hermite_rule(int n);

}  // namespace scbicm
