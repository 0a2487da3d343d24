#include "nvflow/quadrature.hpp"

#include <cmath>
#include <cstdio>

namespace nvflow::quadrature {

namespace {

// Gauss-Kronrod (7,15) nodes/weights on [-1,1]
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename T>
void gk15(const std::function<T(double)>& f, double a, double b, T& result, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T resg{}, resk{};
    const T fc = f(c);
    resg = kWg[3] * fc;
    resk = kWgk[7] * fc;
    double resabs = kWgk[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const T f1 = f(c - x), f2 = f(c + x);
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    result = resk * h;
    err = std::abs(resk - resg) * h;
    // tighten the raw error estimate the usual QUADPACK way
    const double scale = std::pow(200.0 * err / (resabs * h + 1e-300), 1.5);
    if (scale < 1.0) err = resabs * h * scale;
}

template <typename T>
T adaptive(const std::function<T(double)>& f, double a, double b, const QuadOptions& opt) {
    struct Seg {
        double a, b;
        T val;
        double err;
        int depth;
    };
    std::vector<Seg> stack;
    T v0;
    double e0;
    gk15(f, a, b, v0, e0);
    stack.push_back({a, b, v0, e0, 0});
    T total = v0;
    double total_err = e0;
    long evals = 15;
    while (total_err > opt.abs_tol && total_err > opt.rel_tol * std::abs(total)) {
        // split the worst segment
        size_t worst = 0;
        for (size_t i = 1; i < stack.size(); ++i)
            if (stack[i].err > stack[worst].err) worst = i;
        Seg s = stack[worst];
        if (s.depth >= opt.max_depth || evals > opt.max_evals) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "quadrature: refinement limit at [%g, %g] err=%g depth=%d "
                          "(total_err=%g abs_tol=%g)",
                          s.a, s.b, s.err, s.depth, total_err, opt.abs_tol);
            throw ConvergenceFailure(buf);
        }
        const double m = 0.5 * (s.a + s.b);
        Seg l{s.a, m, T{}, 0.0, s.depth + 1}, r{m, s.b, T{}, 0.0, s.depth + 1};
        gk15(f, l.a, l.b, l.val, l.err);
        gk15(f, r.a, r.b, r.val, r.err);
        evals += 30;
        total += l.val + r.val - s.val;
        total_err += l.err + r.err - s.err;
        stack[worst] = l;
        stack.push_back(r);
        if (stack.size() > 100000) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "quadrature: too many segments; worst [%g, %g] err=%g "
                          "(total_err=%g abs_tol=%g rel=%g)",
                          l.a, l.b, l.err, total_err, opt.abs_tol,
                          opt.rel_tol * std::abs(total));
            throw ConvergenceFailure(buf);
        }
    }
    // re-sum for accuracy
    T sum{};
    for (const auto& s : stack) sum += s.val;
    return sum;
}

template <typename T>
T to_infinity(const std::function<T(double)>& f, double a, double first_panel,
              const QuadOptions& opt) {
    T total{};
    double x0 = a, w = first_panel;
    QuadOptions local = opt;
    for (int p = 0; p < 200; ++p) {
        local.abs_tol = std::max(opt.abs_tol * 0.25, 1e-300);
        const T panel = adaptive<T>(f, x0, x0 + w, local);
        total += panel;
        // geometric growth; stop when panels are negligible twice in a row
        if (std::abs(panel) < 0.5 * (opt.abs_tol + opt.rel_tol * std::abs(total))) {
            const T probe = adaptive<T>(f, x0 + w, x0 + 3.0 * w, local);
            total += probe;
            if (std::abs(probe) < 0.5 * (opt.abs_tol + opt.rel_tol * std::abs(total)))
                return total;
            x0 += 3.0 * w;
            w *= 2.0;
            continue;
        }
        x0 += w;
        w *= 1.7;
    }
    throw ConvergenceFailure("quadrature: semi-infinite integral did not settle");
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt) {
    return adaptive<double>(f, a, b, opt);
}

cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b,
                       const QuadOptions& opt) {
    return adaptive<cplx>(f, a, b, opt);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double first_panel, const QuadOptions& opt) {
    return to_infinity<double>(f, a, first_panel, opt);
}

cplx integrate_to_infinity_complex(const std::function<cplx(double)>& f, double a,
                                   double first_panel, const QuadOptions& opt) {
    return to_infinity<cplx>(f, a, first_panel, opt);
}

} // namespace nvflow::quadrature
