#include "logcap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "logcap/errors.hpp"

namespace logcap {

namespace {

// G7,K15 nodes and weights (QUADPACK values, positive half).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Cell {
  double a, b, value, error;
  long id;
};

struct CellOrder {
  bool operator()(const Cell& x, const Cell& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.id > y.id;  // deterministic tie-break
  }
};

Cell evaluate(const std::function<double(double)>& f, double a, double b,
              long id) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double gauss = 0.0, kronrod = 0.0;
  for (int i = 0; i < 8; ++i) {
    kronrod += kWgk[i] * (i == 7 ? fv[7] : fv[i] + fv[14 - i]);
  }
  // Gauss points are the odd Kronrod nodes.
  for (int i = 0; i < 4; ++i) {
    const int j = 2 * i + 1;
    gauss += kWg[i] * (j == 7 ? fv[7] : fv[j] + fv[14 - j]);
  }
  kronrod *= h;
  gauss *= h;
  const double err = std::abs(kronrod - gauss);
  return Cell{a, b, kronrod, std::max(err, 1e-300), id};
}

AdaptiveResult run(const std::function<double(double)>& f, double a, double b,
                   double abs_tol, int max_segments, bool throw_on_budget) {
  if (a == b) return {0.0, 0.0, 0, true};
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
  long next_id = 0;
  Cell root = evaluate(f, a, b, next_id++);
  double total = root.value, toterr = root.error;
  heap.push(root);
  int segments = 1;
  while (toterr > abs_tol && segments < max_segments) {
    Cell worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (m <= worst.a || m >= worst.b) {
      // interval no longer splittable in double precision
      heap.push(Cell{worst.a, worst.b, worst.value, 0.0, worst.id});
      toterr -= worst.error;
      continue;
    }
    Cell left = evaluate(f, worst.a, m, next_id++);
    Cell right = evaluate(f, m, worst.b, next_id++);
    total += left.value + right.value - worst.value;
    toterr += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  // Re-sum cell values in interval order for a stable final estimate.
  std::vector<Cell> cells;
  cells.reserve(heap.size());
  while (!heap.empty()) {
    cells.push_back(heap.top());
    heap.pop();
  }
  std::sort(cells.begin(), cells.end(),
            [](const Cell& x, const Cell& y) { return x.a < y.a; });
  double s = 0.0, comp = 0.0, e = 0.0;
  for (const Cell& cc : cells) {
    const double t = s + cc.value;
    comp +=
        std::abs(s) >= std::abs(cc.value) ? (s - t) + cc.value : (cc.value - t) + s;
    s = t;
    e += cc.error;
  }
  AdaptiveResult res{s + comp, e, segments, e <= abs_tol};
  if (!res.converged && throw_on_budget)
    throw BudgetExceededError(res.value, res.error);
  return res;
}

}  // namespace

AdaptiveResult adaptive_gk(const std::function<double(double)>& f, double a,
                           double b, double abs_tol, int max_segments) {
  return run(f, a, b, abs_tol, max_segments, true);
}

AdaptiveResult adaptive_gk_nothrow(const std::function<double(double)>& f,
                                   double a, double b, double abs_tol,
                                   int max_segments) {
  return run(f, a, b, abs_tol, max_segments, false);
}

}  // namespace logcap
