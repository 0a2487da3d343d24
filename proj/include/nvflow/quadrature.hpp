#pragma once

#include "nvflow/types.hpp"

#include <functional>

namespace nvflow::quadrature {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 50;
    long max_evals = 20'000'000;
};

/// Adaptive Gauss-Kronrod (7,15) on [a,b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b,
                       const QuadOptions& opt = {});

/// Semi-infinite integral of an exponentially decaying integrand: panels of
/// geometrically growing width until the running tail estimate drops below tol.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double first_panel, const QuadOptions& opt = {});

cplx integrate_to_infinity_complex(const std::function<cplx(double)>& f, double a,
                                   double first_panel, const QuadOptions& opt = {});

} // namespace nvflow::quadrature
