#pragma once

#include <vector>

namespace hsps {

struct GaussLegendreRule {
    std::vector<double> nodes;    // ascending on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, nodes found by Newton iteration on P_n.
GaussLegendreRule gauss_legendre(int n);

/// Shared immutable rules used by the overlap kernel.
const GaussLegendreRule& gauss_legendre_64();
const GaussLegendreRule& gauss_legendre_128();

}  // namespace hsps
