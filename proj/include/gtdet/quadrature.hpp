#pragma once

#include <cstddef>
#include <vector>

namespace gtdet {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Legendre rule on [-1, 1]; Newton on P_n from Chebyshev guesses.
// Tables are cached per n and immutable after construction.
const QuadratureRule& gauss_legendre(std::size_t n);

// Gauss-Legendre mapped affinely to [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

// Composite rule: `panels` equal panels on [a, b], `per_panel` nodes each.
QuadratureRule gauss_legendre_panels(double a, double b, std::size_t panels, std::size_t per_panel);

}  // namespace gtdet
