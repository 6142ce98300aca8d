#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "regent/error.hpp"

namespace regent {

namespace detail {

// Tarjan SCCs of the sparsity graph (edge j -> i when a(i, j) != 0).
// Ordering the states by component puts the matrix in block-triangular
// form, so the spectrum is the union of the diagonal blocks' spectra. This
// is the permutation half of balancing: it isolates eigenvalues exactly and
// keeps Jordan chains between components (e.g. chains of self-loop states)
// out of the iterative solver.
inline std::vector<std::vector<Eigen::Index>> strongly_connected_blocks(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<Eigen::Index> stack;
  std::vector<std::vector<Eigen::Index>> blocks;
  int counter = 0;
  std::function<void(Eigen::Index)> visit = [&](Eigen::Index v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (Eigen::Index w = 0; w < n; ++w) {
      if (a(w, v) == 0.0) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<Eigen::Index> block;
      Eigen::Index w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        block.push_back(w);
      } while (w != v);
      std::sort(block.begin(), block.end());
      blocks.push_back(std::move(block));
    }
  };
  for (Eigen::Index v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  return blocks;
}

// Parlett-Reinsch diagonal scaling by powers of two (1-based storage).
inline void balance_scaling(Eigen::MatrixXd& a, int n) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 1; i <= n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 1; j <= n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (int j = 1; j <= n; ++j) a(i, j) *= g;
        for (int j = 1; j <= n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilised elementary similarity
// transforms (1-based storage). Entries below the subdiagonal are zeroed.
inline void hessenberg(Eigen::MatrixXd& a, int n) {
  for (int m = 2; m < n; ++m) {
    double x = 0.0;
    int i = m;
    for (int j = m; j <= n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (int j = m - 1; j <= n; ++j) std::swap(a(i, j), a(m, j));
      for (int j = 1; j <= n; ++j) std::swap(a(j, i), a(j, m));
    }
    if (x != 0.0) {
      for (i = m + 1; i <= n; ++i) {
        double y = a(i, m - 1);
        if (y == 0.0) continue;
        y /= x;
        a(i, m - 1) = y;
        for (int j = m; j <= n; ++j) a(i, j) -= y * a(m, j);
        for (int j = 1; j <= n; ++j) a(j, m) += y * a(j, i);
      }
    }
  }
  for (int i = 3; i <= n; ++i)
    for (int j = 1; j <= i - 2; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix (1-based storage).
// A subdiagonal entry is treated as zero once it is negligible against its
// diagonal neighbours at machine precision (well below 1e-10). Throws
// NumericalError after 100 * n sweeps in total.
inline std::vector<std::complex<double>> hessenberg_qr(Eigen::MatrixXd& a, int n) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<std::complex<double>> ev(n + 1);
  double anorm = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));
  const int cap = 100 * n;
  int total = 0;
  int nn = n;
  double t = 0.0;
  auto sign = [](double mag, double ref) { return ref >= 0.0 ? std::abs(mag) : -std::abs(mag); };
  while (nn >= 1) {
    int its = 0;
    int l;
    do {
      for (l = nn; l >= 2; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        ev[nn--] = {x + t, 0.0};
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign(z, p);
            ev[nn - 1] = ev[nn] = {x + z, 0.0};
            if (z != 0.0) ev[nn] = {x - w / z, 0.0};
          } else {
            ev[nn - 1] = {x + p, z};
            ev[nn] = {x + p, -z};
          }
          nn -= 2;
        } else {
          if (++total > cap)
            throw NumericalError("eigenvalue iteration did not converge within " + std::to_string(cap) + " sweeps");
          if (its > 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (int i = 1; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m;
          double p = 0, q = 0, r = 0, z;
          for (m = nn - 2; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  ev.erase(ev.begin());
  return ev;
}

}  // namespace detail

/// All eigenvalues of a real square matrix (n <= 256): permutation to
/// block-triangular form, diagonal scaling, Hessenberg reduction, then
/// Francis QR on each irreducible block.
inline std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("eigenvalues need a square matrix");
  if (m.rows() > 256) throw InvalidArgument("eigenvalue solver limited to n <= 256");
  if (!m.allFinite()) throw InvalidArgument("matrix has non-finite entries");
  std::vector<std::complex<double>> out;
  for (const auto& block : detail::strongly_connected_blocks(m)) {
    const int k = static_cast<int>(block.size());
    if (k == 1) {
      out.emplace_back(m(block[0], block[0]), 0.0);
      continue;
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) a(i + 1, j + 1) = m(block[i], block[j]);
    detail::balance_scaling(a, k);
    detail::hessenberg(a, k);
    auto ev = detail::hessenberg_qr(a, k);
    out.insert(out.end(), ev.begin(), ev.end());
  }
  return out;
}

/// Eigenvalue moduli, sorted descending.
inline std::vector<double> eigen_moduli(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  for (const auto& z : eigenvalues(m)) out.push_back(std::abs(z));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline std::vector<double> eigen_moduli(const Eigen::MatrixXi& m) { return eigen_moduli(Eigen::MatrixXd(m.cast<double>())); }

}  // namespace regent
