#include "quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace avglab::quad {
namespace {

constexpr std::size_t kMaxPieces = 2000;

struct Cell {
  double lo;
  double hi;
  double value;
  double error;
  double l1;
};

template <class F>
Cell rule(const F& f, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  double l1 = 0.0;
  const double value = gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0.0, &err, &l1);
  // The reported error and L1 refer to the rule on [-1, 1].
  const double scale = 0.5 * (hi - lo);
  return {lo, hi, value, err * scale, l1 * scale};
}

// Global adaptive bisection: split the cell with the largest error until the
// summed error meets the relative tolerance or rounding dominates.
template <class F>
double adaptive(const F& f, double lo, double hi, double tolerance) {
  auto worse = [](const Cell& a, const Cell& b) { return a.error < b.error; };
  std::vector<Cell> heap{rule(f, lo, hi)};
  double value = heap[0].value;
  double error = heap[0].error;
  double l1 = heap[0].l1;
  while (heap.size() < kMaxPieces) {
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
    if (!(error > std::max(tolerance * std::fabs(value), floor))) break;
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Cell c = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (c.lo + c.hi);
    if (!(mid > c.lo && mid < c.hi)) {
      heap.push_back(c);
      break;
    }
    const Cell left = rule(f, c.lo, mid);
    const Cell right = rule(f, mid, c.hi);
    value += left.value + right.value - c.value;
    error += left.error + right.error - c.error;
    l1 += left.l1 + right.l1 - c.l1;
    for (const Cell& n : {left, right}) {
      heap.push_back(n);
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  }
  // Re-add in ascending position order so the result does not depend on the
  // accumulated update order.
  std::sort(heap.begin(), heap.end(), [](const Cell& a, const Cell& b) { return a.lo < b.lo; });
  double total = 0.0;
  for (const Cell& c : heap) total += c.value;
  return total;
}

struct Piece {
  double lo;
  double hi;
  double a_lo;  // singular exponent at lo (0: regular)
  double a_hi;
};

std::vector<Piece> pieces(double lo, double hi, std::vector<Mark> marks) {
  std::vector<Mark> inside;
  double a_lo = 0.0;
  double a_hi = 0.0;
  for (const Mark& m : marks) {
    if (m.at == lo) a_lo = std::max(a_lo, m.exponent);
    else if (m.at == hi) a_hi = std::max(a_hi, m.exponent);
    else if (m.at > lo && m.at < hi) inside.push_back(m);
  }
  std::sort(inside.begin(), inside.end(), [](const Mark& x, const Mark& y) { return x.at < y.at; });
  std::vector<Piece> out;
  double start = lo;
  double a_start = a_lo;
  auto push = [&](double end, double a_end) {
    if (!(end > start)) {
      a_start = std::max(a_start, a_end);
      return;
    }
    if (a_start > 0.0 && a_end > 0.0) {
      const double mid = 0.5 * (start + end);
      out.push_back({start, mid, a_start, 0.0});
      out.push_back({mid, end, 0.0, a_end});
    } else {
      out.push_back({start, end, a_start, a_end});
    }
    start = end;
    a_start = a_end;
  };
  for (const Mark& m : inside) push(m.at, m.exponent);
  push(hi, a_hi);
  return out;
}

template <class F>
double integrate_piece(const F& f, const Piece& p, double tolerance) {
  if (p.a_lo > 0.0 || p.a_hi > 0.0) {
    const bool left = p.a_lo > 0.0;
    const double a = left ? p.a_lo : p.a_hi;
    const double beta = 1.0 / (1.0 - a);
    const double vmax = std::pow(p.hi - p.lo, 1.0 / beta);
    auto g = [&](double v) -> double {
      const double t = std::pow(v, beta);
      const double x = left ? p.lo + t : p.hi - t;
      return f(x) * (beta * std::pow(v, beta - 1.0));
    };
    // Below t_min the argument p + t no longer resolves t; the sliver is
    // taken as constant.
    const double anchor = left ? p.lo : p.hi;
    const double t_min = std::ldexp(std::max(1.0, std::fabs(anchor)), -44);
    const double vmin = std::min(std::pow(t_min, 1.0 / beta), 0.5 * vmax);
    return g(vmin) * vmin + adaptive(g, vmin, vmax, tolerance);
  }
  return adaptive(f, p.lo, p.hi, tolerance);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double tolerance) {
  if (!(hi > lo)) return 0.0;
  return adaptive(f, lo, hi, tolerance);
}

double integrate_marked_real(const std::function<double(double)>& f, double lo, double hi, std::vector<Mark> marks,
                             double tolerance) {
  if (!(hi > lo)) return 0.0;
  double total = 0.0;
  for (const Piece& p : pieces(lo, hi, std::move(marks))) total += integrate_piece(f, p, tolerance);
  return total;
}

cplx integrate_marked(const std::function<cplx(double)>& f, double lo, double hi, std::vector<Mark> marks,
                      double tolerance) {
  if (!(hi > lo)) return 0.0;
  double re = 0.0;
  double im = 0.0;
  auto fr = [&](double x) { return f(x).real(); };
  auto fi = [&](double x) { return f(x).imag(); };
  for (const Piece& p : pieces(lo, hi, std::move(marks))) {
    re += integrate_piece(fr, p, tolerance);
    im += integrate_piece(fi, p, tolerance);
  }
  return {re, im};
}

}  // namespace avglab::quad
