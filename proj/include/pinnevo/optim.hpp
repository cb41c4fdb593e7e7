#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinnevo::optim {

using Vector = Eigen::VectorXd;

/// Loss at x; writes the gradient into g. A non-finite loss or gradient
/// signals numeric overflow.
using Objective = std::function<double(const Vector& x, Vector& g)>;

struct LbfgsConfig {
  int memory = 50;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 25;  // objective evaluations per line search
  int epochs = 100;
  double initial_step = 1.0;
  double time_limit = 0;     // seconds, 0 = unlimited
  double grad_tol = 1e-12;
  bool record_steps = false;
};

enum class Status { completed, converged, overflow, timeout };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::completed: return "completed";
    case Status::converged: return "converged";
    case Status::overflow: return "overflow";
    case Status::timeout: return "timeout";
  }
  return "?";
}

inline Status status_from_string(const std::string& s) {
  if (s == "completed") return Status::completed;
  if (s == "converged") return Status::converged;
  if (s == "overflow") return Status::overflow;
  if (s == "timeout") return Status::timeout;
  throw std::invalid_argument("unknown status '" + s + "'");
}

/// One accepted step: phi(0), phi'(0), alpha, phi(alpha), phi'(alpha).
struct StepRecord {
  double f0, d0, alpha, f, d;
};

struct TrainTrace {
  std::vector<double> losses;  // losses[0] is the initial loss, losses[k] after epoch k
  double min_loss = std::numeric_limits<double>::infinity();
  double wall_time = 0;
  int evaluations = 0;
  Status status = Status::completed;
  std::vector<StepRecord> steps;

  int epochs_run() const { return losses.empty() ? 0 : static_cast<int>(losses.size()) - 1; }

  void record(double f) {
    losses.push_back(f);
    if (f < min_loss) min_loss = f;
  }
};

struct LineSearchResult {
  double alpha = 0, f = 0, d = 0;
  bool ok = false;
  bool overflow = false;
  int evaluations = 0;
};

/// phi(alpha) -> (value, slope); slope may be ignored when value is non-finite.
using LineFunction = std::function<std::pair<double, double>(double alpha)>;

namespace detail {

/// Minimizer of the cubic through (x1, f1, g1) and (x2, f2, g2), kept inside
/// [lo, hi]; bisects when the cubic has no real minimizer.
inline double cubic_min(double x1, double f1, double g1, double x2, double f2, double g2, double lo,
                        double hi) {
  const double d1 = g1 + g2 - 3 * (f1 - f2) / (x1 - x2);
  const double disc = d1 * d1 - g1 * g2;
  if (disc >= 0 && std::isfinite(disc)) {
    const double d2 = std::sqrt(disc) * (x2 > x1 ? 1.0 : -1.0);
    const double x = x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2 * d2));
    if (std::isfinite(x)) return std::min(std::max(x, lo), hi);
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Bracketing phase followed by zoom, returning a step that satisfies the
/// strong Wolfe conditions.
inline LineSearchResult wolfe_line_search(const LineFunction& phi, double f0, double d0, double c1,
                                          double c2, double alpha0 = 1.0, int max_evals = 25) {
  if (!(d0 < 0)) throw std::invalid_argument("line search needs a descent direction (phi'(0) < 0)");
  if (!(0 < c1 && c1 < c2 && c2 < 1)) throw std::invalid_argument("need 0 < c1 < c2 < 1");
  LineSearchResult res;
  auto eval = [&](double a, double& f, double& d) {
    auto [v, s] = phi(a);
    ++res.evaluations;
    f = v;
    d = s;
    return std::isfinite(v) && std::isfinite(s);
  };
  auto accept = [&](double a, double f, double d) {
    res.alpha = a;
    res.f = f;
    res.d = d;
    res.ok = true;
    return res;
  };
  auto armijo = [&](double a, double f) { return f <= f0 + c1 * a * d0; };
  auto curvature = [&](double d) { return std::abs(d) <= -c2 * d0; };

  double a_prev = 0, f_prev = f0, d_prev = d0;
  double a = alpha0, f = 0, d = 0;
  double lo = 0, f_lo = 0, d_lo = 0, hi = 0, f_hi = 0, d_hi = 0;
  bool bracketed = false;
  while (res.evaluations < max_evals) {
    if (!eval(a, f, d)) {
      res.overflow = true;
      return res;
    }
    if (!armijo(a, f) || (res.evaluations > 1 && f >= f_prev)) {
      lo = a_prev, f_lo = f_prev, d_lo = d_prev;
      hi = a, f_hi = f, d_hi = d;
      bracketed = true;
      break;
    }
    if (curvature(d)) return accept(a, f, d);
    if (d >= 0) {
      lo = a, f_lo = f, d_lo = d;
      hi = a_prev, f_hi = f_prev, d_hi = d_prev;
      bracketed = true;
      break;
    }
    const double next = detail::cubic_min(a_prev, f_prev, d_prev, a, f, d, a + 0.01 * (a - a_prev), 10 * a);
    a_prev = a, f_prev = f, d_prev = d;
    a = next;
  }
  if (!bracketed) return res;

  // Zoom: lo satisfies sufficient decrease and has the lowest value so far.
  while (res.evaluations < max_evals) {
    const double left = std::min(lo, hi), right = std::max(lo, hi);
    const double width = right - left;
    if (width * std::max(std::abs(d_lo), std::abs(d_hi)) < 1e-30 || width < 1e-20 * std::max(1.0, right))
      break;
    a = detail::cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi, left + 0.1 * width, right - 0.1 * width);
    if (!eval(a, f, d)) {
      res.overflow = true;
      return res;
    }
    if (!armijo(a, f) || f >= f_lo) {
      hi = a, f_hi = f, d_hi = d;
    } else {
      if (curvature(d)) return accept(a, f, d);
      if (d * (hi - lo) >= 0) {
        hi = lo, f_hi = f_lo, d_hi = d_lo;
      }
      lo = a, f_lo = f, d_lo = d;
    }
  }
  return res;
}

/// Full-batch L-BFGS; one epoch is one iteration.
inline TrainTrace minimize(const Objective& objective, Vector& x, const LbfgsConfig& cfg) {
  if (cfg.memory < 1) throw std::invalid_argument("L-BFGS memory must be >= 1");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  TrainTrace trace;
  Vector g(x.size()), g_new(x.size()), x_new(x.size()), dir(x.size());
  double f = objective(x, g);
  ++trace.evaluations;
  if (!std::isfinite(f) || !g.allFinite()) {
    trace.status = Status::overflow;
    trace.wall_time = elapsed();
    return trace;
  }
  trace.record(f);

  std::deque<Vector> S, Y;
  std::deque<double> rho;
  std::vector<double> alpha_buf(cfg.memory);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.time_limit > 0 && elapsed() > cfg.time_limit) {
      trace.status = Status::timeout;
      break;
    }
    if (g.lpNorm<Eigen::Infinity>() < cfg.grad_tol) {
      trace.status = Status::converged;
      break;
    }
    bool retried = false;
    LineSearchResult ls;
    double alpha0 = 0, gtd = 0;
    while (true) {
      // Two-loop recursion.
      dir = -g;
      const int m = static_cast<int>(S.size());
      for (int i = m - 1; i >= 0; --i) {
        alpha_buf[i] = rho[i] * S[i].dot(dir);
        dir -= alpha_buf[i] * Y[i];
      }
      if (m > 0) dir *= S.back().dot(Y.back()) / Y.back().squaredNorm();
      for (int i = 0; i < m; ++i) {
        const double beta = rho[i] * Y[i].dot(dir);
        dir += (alpha_buf[i] - beta) * S[i];
      }
      gtd = g.dot(dir);
      if (!(gtd < 0)) {
        S.clear(), Y.clear(), rho.clear();
        dir = -g;
        gtd = g.dot(dir);
      }
      alpha0 = S.empty() ? std::min(cfg.initial_step, 1.0 / g.lpNorm<1>()) : cfg.initial_step;
      auto phi = [&](double a) -> std::pair<double, double> {
        x_new = x + a * dir;
        const double v = objective(x_new, g_new);
        return {v, g_new.dot(dir)};
      };
      ls = wolfe_line_search(phi, f, gtd, cfg.c1, cfg.c2, alpha0, cfg.max_line_search);
      trace.evaluations += ls.evaluations;
      if (ls.ok || ls.overflow || retried || S.empty()) break;
      // Stale curvature pairs: restart from steepest descent once.
      S.clear(), Y.clear(), rho.clear();
      retried = true;
    }
    if (ls.overflow) {
      trace.status = Status::overflow;
      break;
    }
    if (!ls.ok) {
      trace.status = Status::converged;
      break;
    }
    // The last phi() call was at the accepted step, so x_new and g_new hold it.
    const double f_acc = ls.f;
    if (cfg.record_steps) trace.steps.push_back({f, gtd, ls.alpha, f_acc, g_new.dot(dir)});
    Vector s = x_new - x;
    Vector y = g_new - g;
    const double ys = y.dot(s);
    if (ys > 1e-10 * y.squaredNorm() && ys > 0) {
      if (static_cast<int>(S.size()) == cfg.memory) {
        S.pop_front(), Y.pop_front(), rho.pop_front();
      }
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / ys);
    }
    x = x_new;
    g = g_new;
    f = f_acc;
    trace.record(f);
  }
  trace.wall_time = elapsed();
  return trace;
}

}  // namespace pinnevo::optim
