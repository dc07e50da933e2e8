#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

namespace herald::quad {

// Adaptive Gauss-Kronrod 7/15 for integrands valued in any Eigen-like type
// supporting +, scalar *, and cwiseAbs().maxCoeff().
template <class T, class F>
T gauss_kronrod(const F& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                int max_depth = 40) {
  static constexpr double xgk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  struct Piece {
    T kronrod;
    double err;
  };
  auto rule = [&](double lo, double hi) -> Piece {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    T fc = f(c);
    T k = fc * wgk[7];
    T g = fc * wg[3];
    for (int i = 0; i < 7; ++i) {
      T f1 = f(c - h * xgk[i]);
      T f2 = f(c + h * xgk[i]);
      k = k + (f1 + f2) * wgk[i];
      if (i % 2 == 1) g = g + (f1 + f2) * wg[i / 2];
    }
    k = k * h;
    g = g * h;
    const double err = (k - g).cwiseAbs().maxCoeff();
    return {k, err};
  };

  std::function<T(double, double, const Piece&, int, double)> refine =
      [&](double lo, double hi, const Piece& whole, int depth, double tol) -> T {
    if (whole.err <= tol || depth >= max_depth) return whole.kronrod;
    const double mid = 0.5 * (lo + hi);
    Piece left = rule(lo, mid);
    Piece right = rule(mid, hi);
    return refine(lo, mid, left, depth + 1, 0.5 * tol) +
           refine(mid, hi, right, depth + 1, 0.5 * tol);
  };

  Piece whole = rule(a, b);
  const double scale = whole.kronrod.cwiseAbs().maxCoeff();
  const double tol = std::max(abs_tol, rel_tol * scale);
  return refine(a, b, whole, 0, tol);
}

}  // namespace herald::quad
