#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinnevo/autonet.hpp"
#include "pinnevo/exprtree/series.hpp"

namespace pinnevo::problems {

using autonet::JetSpec;
using autonet::Matrix;
using autonet::Vector;

// ---------------------------------------------------------------------------
// Second-order forward jet in up to three variables, for closed-form solutions.

struct Jet2 {
  double v = 0;
  std::array<double, 3> g{};
  std::array<double, 9> h{};

  Jet2() = default;
  Jet2(double c) : v(c) {}  // NOLINT

  static Jet2 variable(double x, int i) {
    Jet2 j(x);
    j.g[i] = 1.0;
    return j;
  }
  double dd(int i, int k) const { return h[i * 3 + k]; }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r(a.v + b.v);
  for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] + b.g[i];
  for (int i = 0; i < 9; ++i) r.h[i] = a.h[i] + b.h[i];
  return r;
}

inline Jet2 operator-(const Jet2& a) {
  Jet2 r(-a.v);
  for (int i = 0; i < 3; ++i) r.g[i] = -a.g[i];
  for (int i = 0; i < 9; ++i) r.h[i] = -a.h[i];
  return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r(a.v * b.v);
  for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      r.h[i * 3 + k] = a.h[i * 3 + k] * b.v + a.g[i] * b.g[k] + a.g[k] * b.g[i] + a.v * b.h[i * 3 + k];
  return r;
}

/// phi(a) given phi, phi', phi'' at a.v.
inline Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
  Jet2 r(f0);
  for (int i = 0; i < 3; ++i) r.g[i] = f1 * a.g[i];
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r.h[i * 3 + k] = f2 * a.g[i] * a.g[k] + f1 * a.h[i * 3 + k];
  return r;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  const double inv = 1.0 / b.v;
  return a * chain(b, inv, -inv * inv, 2 * inv * inv * inv);
}

inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
inline Jet2 sin(const Jet2& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet2 cos(const Jet2& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }

// ---------------------------------------------------------------------------
// Problem definition

/// Residual arithmetic carries derivatives with respect to the (at most 12)
/// jet entries of one point, which yields the adjoint fed to the network.
inline constexpr int kJetEntries = 12;
using RDual = exprtree::Dual<kJetEntries>;

enum class TermKind { residual, boundary, initial };

struct PointSet {
  Matrix X;     // dims x N
  Matrix data;  // per-point constants, rows = fields
};

/// One loss term: mean over its points of the squared residual components.
struct TermDef {
  std::string name;
  TermKind kind = TermKind::residual;
  JetSpec spec;
  int residuals = 1;
  /// Per-point constants derived from the exact solution (source terms, data).
  std::function<void(const Jet2* exact, const double* x, double* data)> make_data;
  int data_rows = 0;
  /// jet[o * C + c] -> r[m]
  std::function<void(const RDual* jet, const double* data, RDual* r)> residual;
};

struct PdeProblem {
  std::string family;  // klein_gordon, burgers, lame
  std::string label;   // I, II, ...
  int input_dim = 2, output_dim = 1;
  double lambda_b = 100, lambda_0 = 100;
  std::vector<TermDef> terms;
  /// Exact solution jets at x (second order in every input).
  std::function<void(const double* x, Jet2* out)> exact;
  std::function<std::vector<PointSet>()> sample_terms;  // one set per term
  std::function<Matrix()> sample_test;
  std::string name() const { return family + ":" + label; }
  std::string input_names;  // e.g. "x,t"
};

struct SampleSet {
  std::vector<PointSet> terms;
  Matrix test;
  Matrix test_exact;  // output_dim x N_test
};

inline Jet2 seed(const double* x, int i) { return Jet2::variable(x[i], i); }

/// Deterministic samples with exact data attached.
inline SampleSet sample_uniform(const PdeProblem& p) {
  SampleSet s;
  s.terms = p.sample_terms();
  if (s.terms.size() != p.terms.size()) throw std::logic_error("sampler/term mismatch");
  std::vector<Jet2> ex(p.output_dim);
  for (std::size_t t = 0; t < p.terms.size(); ++t) {
    const TermDef& def = p.terms[t];
    PointSet& ps = s.terms[t];
    ps.data.resize(def.data_rows, ps.X.cols());
    if (!def.make_data) continue;
    for (Eigen::Index n = 0; n < ps.X.cols(); ++n) {
      p.exact(ps.X.col(n).data(), ex.data());
      def.make_data(ex.data(), ps.X.col(n).data(), ps.data.col(n).data());
    }
  }
  s.test = p.sample_test();
  s.test_exact.resize(p.output_dim, s.test.cols());
  for (Eigen::Index n = 0; n < s.test.cols(); ++n) {
    p.exact(s.test.col(n).data(), ex.data());
    for (int o = 0; o < p.output_dim; ++o) s.test_exact(o, n) = ex[o].v;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Fields

class Field {
 public:
  virtual ~Field() = default;
  /// Fills Y (outputs x components*N) for the points X; false if non-finite.
  virtual bool jets(const Matrix& X, const JetSpec& spec, Matrix& Y) const = 0;
};

/// The closed-form solution as a field; used to certify the problem setup.
class ExactField : public Field {
 public:
  explicit ExactField(const PdeProblem& p) : p_(p) {}
  bool jets(const Matrix& X, const JetSpec& spec, Matrix& Y) const override {
    const Eigen::Index N = X.cols();
    Y.resize(p_.output_dim, spec.components() * N);
    std::vector<Jet2> ex(p_.output_dim);
    for (Eigen::Index n = 0; n < N; ++n) {
      p_.exact(X.col(n).data(), ex.data());
      for (int o = 0; o < p_.output_dim; ++o) {
        Y(o, n) = ex[o].v;
        for (std::size_t f = 0; f < spec.first.size(); ++f)
          Y(o, (1 + f) * N + n) = ex[o].g[spec.first[f]];
        for (std::size_t q = 0; q < spec.second.size(); ++q)
          Y(o, (1 + spec.first.size() + q) * N + n) = ex[o].dd(spec.second[q][0], spec.second[q][1]);
      }
    }
    return Y.allFinite();
  }

 private:
  const PdeProblem& p_;
};

class NetworkField : public Field {
 public:
  NetworkField(const autonet::Network& net, const Vector& theta) : net_(net), theta_(theta) {}
  bool jets(const Matrix& X, const JetSpec& spec, Matrix& Y) const override {
    autonet::Tape tape;
    const bool ok = net_.forward(theta_, X, spec, tape, false);
    Y = std::move(tape.Y);
    return ok;
  }

 private:
  const autonet::Network& net_;
  const Vector& theta_;
};

// ---------------------------------------------------------------------------
// Loss

struct LossReport {
  double total = 0, residual = 0, boundary = 0, initial = 0;
  bool finite = true;
};

namespace detail {

/// Mean-square residual of one term. If `Ybar` is given, also writes
/// d(weight * term)/dY into it.
inline double term_loss(const TermDef& def, const PointSet& ps, const Matrix& Y, int outputs,
                        double weight, Matrix* Ybar) {
  const Eigen::Index N = ps.X.cols();
  const int C = def.spec.components();
  if (N == 0) return 0.0;
  if (outputs * C > kJetEntries) throw std::logic_error("jet too large for residual duals");
  if (Ybar) Ybar->setZero(Y.rows(), Y.cols());
  std::array<RDual, kJetEntries> jet;
  std::vector<RDual> r(def.residuals);
  const double* empty = nullptr;
  double sum = 0;
  for (Eigen::Index n = 0; n < N; ++n) {
    for (int o = 0; o < outputs; ++o)
      for (int c = 0; c < C; ++c) {
        RDual d(Y(o, c * N + n));
        d.d[o * C + c] = 1.0;
        jet[o * C + c] = d;
      }
    def.residual(jet.data(), ps.data.rows() ? ps.data.col(n).data() : empty, r.data());
    for (int m = 0; m < def.residuals; ++m) {
      sum += r[m].v * r[m].v;
      if (Ybar) {
        const double s = 2.0 * weight * r[m].v / static_cast<double>(N);
        for (int o = 0; o < outputs; ++o)
          for (int c = 0; c < C; ++c) (*Ybar)(o, c * N + n) += s * r[m].d[o * C + c];
      }
    }
  }
  return sum / static_cast<double>(N);
}

inline double weight_of(const PdeProblem& p, TermKind k) {
  return k == TermKind::residual ? 1.0 : k == TermKind::boundary ? p.lambda_b : p.lambda_0;
}

inline void add_term(LossReport& rep, TermKind k, double v) {
  (k == TermKind::residual ? rep.residual : k == TermKind::boundary ? rep.boundary : rep.initial) += v;
}

}  // namespace detail

/// L = L_r + lambda_b L_b + lambda_0 L_0.
inline LossReport loss(const PdeProblem& p, const Field& field, const SampleSet& s) {
  LossReport rep;
  Matrix Y;
  for (std::size_t t = 0; t < p.terms.size(); ++t) {
    const TermDef& def = p.terms[t];
    if (!field.jets(s.terms[t].X, def.spec, Y)) rep.finite = false;
    detail::add_term(rep, def.kind, detail::term_loss(def, s.terms[t], Y, p.output_dim, 1.0, nullptr));
  }
  rep.total = rep.residual + p.lambda_b * rep.boundary + p.lambda_0 * rep.initial;
  if (!std::isfinite(rep.total)) rep.finite = false;
  return rep;
}

/// Loss and dL/dθ for a network. Returns the report; `grad` is overwritten.
inline LossReport loss_and_gradient(const PdeProblem& p, const SampleSet& s,
                                    const autonet::Network& net, const Vector& theta, Vector& grad) {
  LossReport rep;
  grad = Vector::Zero(net.param_count());
  autonet::Tape tape;
  Matrix Ybar;
  for (std::size_t t = 0; t < p.terms.size(); ++t) {
    const TermDef& def = p.terms[t];
    if (!net.forward(theta, s.terms[t].X, def.spec, tape, true)) {
      rep.finite = false;
      rep.total = std::numeric_limits<double>::quiet_NaN();
      return rep;
    }
    const double w = detail::weight_of(p, def.kind);
    detail::add_term(rep, def.kind, detail::term_loss(def, s.terms[t], tape.Y, p.output_dim, w, &Ybar));
    net.backward(theta, tape, Ybar, grad);
  }
  rep.total = rep.residual + p.lambda_b * rep.boundary + p.lambda_0 * rep.initial;
  if (!std::isfinite(rep.total) || !grad.allFinite()) rep.finite = false;
  return rep;
}

/// ||approx - exact|| / ||exact|| per output component over the test points.
inline std::vector<double> relative_l2_error(const Matrix& approx, const Matrix& exact) {
  if (approx.rows() != exact.rows() || approx.cols() != exact.cols())
    throw std::invalid_argument("shape mismatch in relative error");
  std::vector<double> out;
  for (Eigen::Index o = 0; o < exact.rows(); ++o) {
    const double denom = exact.row(o).norm();
    if (denom == 0) throw std::domain_error("exact solution has zero norm");
    out.push_back((approx.row(o) - exact.row(o)).norm() / denom);
  }
  return out;
}

inline std::vector<double> relative_l2_error(const Field& field, const PdeProblem& p,
                                             const SampleSet& s) {
  Matrix Y;
  const JetSpec spec = JetSpec::make(p.input_dim);
  constexpr Eigen::Index chunk = 8192;
  Matrix approx(p.output_dim, s.test.cols());
  for (Eigen::Index c = 0; c < s.test.cols(); c += chunk) {
    const Eigen::Index n = std::min(chunk, s.test.cols() - c);
    field.jets(s.test.middleCols(c, n), spec, Y);
    approx.middleCols(c, n) = Y;
  }
  return relative_l2_error(approx, s.test_exact);
}

// ---------------------------------------------------------------------------
// Lattices

namespace detail {

inline Matrix from_points(const std::vector<std::array<double, 3>>& pts, int dims) {
  Matrix X(dims, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t n = 0; n < pts.size(); ++n)
    for (int d = 0; d < dims; ++d) X(d, static_cast<Eigen::Index>(n)) = pts[n][d];
  return X;
}

/// Splits `total` into parts proportional to `weights` (largest remainder).
inline std::vector<int> apportion(const std::vector<double>& weights, int total) {
  double sum = 0;
  for (double w : weights) sum += w;
  std::vector<int> out(weights.size());
  std::vector<std::pair<double, std::size_t>> rem;
  int used = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double exact = total * weights[k] / sum;
    out[k] = static_cast<int>(std::floor(exact));
    used += out[k];
    rem.emplace_back(exact - out[k], k);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (int k = 0; k < total - used; ++k) ++out[rem[k].second];
  return out;
}

/// Points on concentric rings a < r < b: ring radii at cell midpoints, point
/// counts proportional to radius, equally spaced in angle.
inline Matrix annulus_rings(double a, double b, int total) {
  const double mean_r = 0.5 * (a + b);
  const int rings = std::max(1, static_cast<int>(std::lround(
                                   std::sqrt(total * (b - a) / (2 * std::numbers::pi * mean_r)))));
  std::vector<double> radii(rings);
  for (int k = 0; k < rings; ++k) radii[k] = a + (b - a) * (k + 0.5) / rings;
  const auto counts = apportion(radii, total);
  std::vector<std::array<double, 3>> pts;
  for (int k = 0; k < rings; ++k)
    for (int m = 0; m < counts[k]; ++m) {
      const double th = 2 * std::numbers::pi * (m + 0.5 * (k % 2)) / counts[k];
      pts.push_back({radii[k] * std::cos(th), radii[k] * std::sin(th), 0});
    }
  return from_points(pts, 2);
}

inline Matrix circle(double r, int count) {
  std::vector<std::array<double, 3>> pts;
  for (int m = 0; m < count; ++m) {
    const double th = 2 * std::numbers::pi * m / count;
    pts.push_back({r * std::cos(th), r * std::sin(th), 0});
  }
  return from_points(pts, 2);
}

/// Points of the lattice {i/n} inside the L-shaped region [0,1]^2 minus
/// [0,0.5) x (0.5,1]. With `drop_notch_edge` the segment x = 0.5, y > 0.5 is
/// dropped as well.
inline std::vector<std::array<double, 2>> l_shape_lattice(int n, bool drop_notch_edge) {
  std::vector<std::array<double, 2>> pts;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      // Compare on integers so 0.5 is exact: 2i < n <=> x < 0.5.
      const bool in_notch = (drop_notch_edge ? 2 * i <= n : 2 * i < n) && 2 * j > n;
      if (!in_notch) pts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  return pts;
}

/// Lattice points {i/n} strictly inside the L-shaped region.
inline std::vector<std::array<double, 2>> l_shape_interior(int n) {
  std::vector<std::array<double, 2>> pts;
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i) {
      const bool notch = 2 * i <= n && 2 * j >= n;
      if (!notch) pts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  return pts;
}

/// Points spaced 1/n along the L-shaped boundary, walking the closed polygon.
inline std::vector<std::array<double, 2>> l_shape_perimeter(int n) {
  const std::array<std::array<double, 2>, 6> corners = {
      {{0, 0}, {1, 0}, {1, 1}, {0.5, 1}, {0.5, 0.5}, {0, 0.5}}};
  std::vector<std::array<double, 2>> pts;
  for (int c = 0; c < 6; ++c) {
    const auto& p = corners[c];
    const auto& q = corners[(c + 1) % 6];
    const double len = std::abs(q[0] - p[0]) + std::abs(q[1] - p[1]);
    const int steps = static_cast<int>(std::lround(len * n));
    for (int k = 0; k < steps; ++k) {
      const double s = static_cast<double>(k) / steps;
      pts.push_back({p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])});
    }
  }
  return pts;
}

inline bool in_l_shape(double x, double y) {
  return x >= 0 && x <= 1 && y >= 0 && y <= 1 && !(x < 0.5 && y > 0.5);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Klein-Gordon: u_tt - u_xx + u^3 = f on [0,1] x (0,1]

struct KleinGordonCase {
  double omega;  // x cos(omega pi t) + c (x t)^3
  double cubic;
};

inline PdeProblem klein_gordon(const std::string& label) {
  KleinGordonCase kc;
  if (label == "I") kc = {5, 1.0};
  else if (label == "II") kc = {4, 1.0};
  else if (label == "III") kc = {6, 1.2};
  else throw std::invalid_argument("klein_gordon has cases I, II, III");
  PdeProblem p;
  p.family = "klein_gordon";
  p.label = label;
  p.input_dim = 2;
  p.output_dim = 1;
  p.input_names = "x,t";
  p.lambda_b = p.lambda_0 = 100;
  p.exact = [kc](const double* x, Jet2* out) {
    const Jet2 X = seed(x, 0), T = seed(x, 1);
    const Jet2 xt = X * T;
    out[0] = X * cos(kc.omega * std::numbers::pi * T) + kc.cubic * (xt * xt * xt);
  };
  TermDef res;
  res.name = "residual";
  res.kind = TermKind::residual;
  res.spec = JetSpec::make(2, {}, {{1, 1}, {0, 0}});
  res.data_rows = 1;
  res.make_data = [](const Jet2* e, const double*, double* d) {
    const double u = e[0].v;
    d[0] = e[0].dd(1, 1) - e[0].dd(0, 0) + u * u * u;
  };
  {
    const int utt = res.spec.second_slot(1, 1), uxx = res.spec.second_slot(0, 0);
    res.residual = [utt, uxx](const RDual* j, const double* d, RDual* r) {
      r[0] = j[utt] - j[uxx] + j[0] * j[0] * j[0] - RDual(d[0]);
    };
  }
  TermDef ini;
  ini.name = "initial";
  ini.kind = TermKind::initial;
  ini.spec = JetSpec::make(2, {1});
  ini.residuals = 2;
  ini.data_rows = 2;
  ini.make_data = [](const Jet2* e, const double*, double* d) {
    d[0] = e[0].v;
    d[1] = e[0].g[1];
  };
  {
    const int ut = ini.spec.first_slot(1);
    ini.residual = [ut](const RDual* j, const double* d, RDual* r) {
      r[0] = j[0] - RDual(d[0]);
      r[1] = j[ut] - RDual(d[1]);
    };
  }
  TermDef bnd;
  bnd.name = "boundary";
  bnd.kind = TermKind::boundary;
  bnd.spec = JetSpec::make(2);
  bnd.data_rows = 1;
  bnd.make_data = [](const Jet2* e, const double*, double* d) { d[0] = e[0].v; };
  bnd.residual = [](const RDual* j, const double* d, RDual* r) { r[0] = j[0] - RDual(d[0]); };
  p.terms = {res, bnd, ini};

  p.sample_terms = [] {
    std::vector<std::array<double, 3>> col, bnd, ini;
    for (int j = 1; j <= 60; ++j)
      for (int i = 1; i <= 60; ++i) col.push_back({i / 61.0, j / 61.0, 0});
    for (int side = 0; side < 2; ++side)
      for (int k = 0; k <= 80; ++k) bnd.push_back({static_cast<double>(side), k / 80.0, 0});
    for (int k = 0; k <= 80; ++k) ini.push_back({k / 80.0, 0, 0});
    return std::vector<PointSet>{{detail::from_points(col, 2), {}},
                                 {detail::from_points(bnd, 2), {}},
                                 {detail::from_points(ini, 2), {}}};
  };
  p.sample_test = [] {
    std::vector<std::array<double, 3>> pts;
    for (int j = 0; j <= 100; ++j)
      for (int i = 0; i <= 100; ++i) pts.push_back({i / 100.0, j / 100.0, 0});
    return detail::from_points(pts, 2);
  };
  return p;
}

// ---------------------------------------------------------------------------
// Burgers: u_t + u (u_x + u_y) - a (u_xx + u_yy) = 0 on the L-shape, t in (0,2]

inline PdeProblem burgers(const std::string& label) {
  double alpha;
  if (label == "I") alpha = 0.1;
  else if (label == "II") alpha = 0.15;
  else if (label == "III") alpha = 0.05;
  else throw std::invalid_argument("burgers has cases I, II, III");
  PdeProblem p;
  p.family = "burgers";
  p.label = label;
  p.input_dim = 3;
  p.output_dim = 1;
  p.input_names = "x,y,t";
  p.lambda_b = p.lambda_0 = 100;
  p.exact = [alpha](const double* x, Jet2* out) {
    const Jet2 X = seed(x, 0), Y = seed(x, 1), T = seed(x, 2);
    out[0] = Jet2(1.0) / (Jet2(1.0) + exp((0.5 / alpha) * (X + Y - T)));
  };
  TermDef res;
  res.name = "residual";
  res.kind = TermKind::residual;
  res.spec = JetSpec::make(3, {0, 1, 2}, {{0, 0}, {1, 1}});
  {
    const int ux = res.spec.first_slot(0), uy = res.spec.first_slot(1), ut = res.spec.first_slot(2);
    const int uxx = res.spec.second_slot(0, 0), uyy = res.spec.second_slot(1, 1);
    res.residual = [=](const RDual* j, const double*, RDual* r) {
      r[0] = j[ut] + j[0] * (j[ux] + j[uy]) - alpha * (j[uxx] + j[uyy]);
    };
  }
  TermDef bnd;
  bnd.name = "boundary";
  bnd.kind = TermKind::boundary;
  bnd.spec = JetSpec::make(3);
  bnd.data_rows = 1;
  bnd.make_data = [](const Jet2* e, const double*, double* d) { d[0] = e[0].v; };
  bnd.residual = [](const RDual* j, const double* d, RDual* r) { r[0] = j[0] - RDual(d[0]); };
  TermDef ini = bnd;
  ini.name = "initial";
  ini.kind = TermKind::initial;
  p.terms = {res, bnd, ini};

  p.sample_terms = [] {
    std::vector<std::array<double, 3>> col, bnd, ini;
    const auto interior = detail::l_shape_interior(14);
    for (int k = 1; k <= 50; ++k)
      for (auto& q : interior) col.push_back({q[0], q[1], 2.0 * k / 50});
    const auto edge = detail::l_shape_perimeter(30);
    for (int k = 0; k <= 30; ++k)
      for (auto& q : edge) bnd.push_back({q[0], q[1], 2.0 * k / 30});
    for (auto& q : detail::l_shape_lattice(30, true)) ini.push_back({q[0], q[1], 0});
    return std::vector<PointSet>{{detail::from_points(col, 3), {}},
                                 {detail::from_points(bnd, 3), {}},
                                 {detail::from_points(ini, 3), {}}};
  };
  p.sample_test = [] {
    std::vector<std::array<double, 3>> pts;
    const auto lattice = detail::l_shape_lattice(50, false);
    for (int k = 0; k <= 50; ++k)
      for (auto& q : lattice) pts.push_back({q[0], q[1], 2.0 * k / 50});
    return detail::from_points(pts, 3);
  };
  return p;
}

// ---------------------------------------------------------------------------
// Lame: plane-strain displacement equilibrium on the annulus a <= r <= b

struct LameCase {
  double E = 2.1, mu = 0.25, q1 = 23, q2 = 3, a = 1, b = 2;
  int inner = 200, outer = 400, interior = 5740, test = 23276;

  double A() const { return q1 * (1 - mu * mu) * b * b / (E * (b * b * (1 + mu) + a * a * (1 - mu))); }
  double B() const { return q2 * (1 + mu) * b * b / (E * a * a); }
};

inline LameCase lame_case(const std::string& label) {
  LameCase c;
  if (label == "I") return c;
  if (label == "II") {
    c.q1 = 30;
    c.q2 = 2;
    return c;
  }
  if (label == "III") {
    c.E = 3;
    c.mu = 0.3;
    return c;
  }
  if (label == "IV") {
    c.a = 1.2;
    c.b = 1.8;
    c.outer = 300;
    c.interior = 4232;
    c.test = 17268;
    return c;
  }
  if (label == "V") {
    c.a = 0.8;
    c.b = 2.2;
    c.outer = 550;
    c.interior = 6648;
    c.test = 26944;
    return c;
  }
  throw std::invalid_argument("lame has cases I, II, III, IV, V");
}

inline PdeProblem lame(const std::string& label) {
  const LameCase c = lame_case(label);
  PdeProblem p;
  p.family = "lame";
  p.label = label;
  p.input_dim = 2;
  p.output_dim = 2;
  p.input_names = "x,y";
  p.lambda_b = 10;
  p.lambda_0 = 0;
  const double A = c.A(), B = c.B();
  p.exact = [c, A, B](const double* x, Jet2* out) {
    const Jet2 X = seed(x, 0), Y = seed(x, 1);
    const Jet2 ratio = Jet2(c.a * c.a) / (X * X + Y * Y);
    out[0] = A * ((ratio - 1.0) * X) + B * ((1.0 - ratio) * Y);
    out[1] = A * ((ratio - 1.0) * Y) - B * ((1.0 - ratio) * X);
  };
  const double k = c.E / (1 - c.mu * c.mu);
  const double half_minus = 0.5 * (1 - c.mu), half_plus = 0.5 * (1 + c.mu);

  TermDef res;
  res.name = "residual";
  res.kind = TermKind::residual;
  res.spec = JetSpec::make(2, {}, {{0, 0}, {1, 1}, {0, 1}});
  res.residuals = 2;
  {
    const int C = res.spec.components();
    const int xx = res.spec.second_slot(0, 0), yy = res.spec.second_slot(1, 1),
              xy = res.spec.second_slot(0, 1);
    res.residual = [=](const RDual* j, const double*, RDual* r) {
      const RDual* u = j;
      const RDual* v = j + C;
      r[0] = k * (u[xx] + half_minus * u[yy] + half_plus * v[xy]);
      r[1] = k * (v[yy] + half_minus * v[xx] + half_plus * u[xy]);
    };
  }
  TermDef inner;
  inner.name = "inner";
  inner.kind = TermKind::boundary;
  inner.spec = JetSpec::make(2);
  inner.residuals = 2;
  inner.residual = [](const RDual* j, const double*, RDual* r) {
    r[0] = j[0];
    r[1] = j[1];
  };
  TermDef outer;
  outer.name = "outer";
  outer.kind = TermKind::boundary;
  outer.spec = JetSpec::make(2, {0, 1});
  outer.residuals = 2;
  outer.data_rows = 4;
  outer.make_data = [c](const Jet2*, const double* x, double* d) {
    const double n1 = x[0] / c.b, n2 = x[1] / c.b;
    d[0] = n1;
    d[1] = n2;
    d[2] = -c.q1 * n1 + c.q2 * n2;
    d[3] = -c.q1 * n2 - c.q2 * n1;
  };
  {
    const int C = outer.spec.components();
    const int dx = outer.spec.first_slot(0), dy = outer.spec.first_slot(1);
    const double mu = c.mu;
    outer.residual = [=](const RDual* j, const double* d, RDual* r) {
      const RDual* u = j;
      const RDual* v = j + C;
      const double n1 = d[0], n2 = d[1];
      r[0] = k * (n1 * (u[dx] + mu * v[dy]) + (n2 * half_minus) * (u[dy] + v[dx])) - RDual(d[2]);
      r[1] = k * (n2 * (v[dy] + mu * u[dx]) + (n1 * half_minus) * (v[dx] + u[dy])) - RDual(d[3]);
    };
  }
  p.terms = {res, inner, outer};
  p.sample_terms = [c] {
    return std::vector<PointSet>{{detail::annulus_rings(c.a, c.b, c.interior), {}},
                                 {detail::circle(c.a, c.inner), {}},
                                 {detail::circle(c.b, c.outer), {}}};
  };
  p.sample_test = [c] { return detail::annulus_rings(c.a, c.b, c.test); };
  return p;
}

/// "klein_gordon:I", "burgers:III", "lame:IV", ...
inline PdeProblem make_problem(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string family = spec.substr(0, colon);
  const std::string label = colon == std::string::npos ? "I" : spec.substr(colon + 1);
  if (family == "klein_gordon") return klein_gordon(label);
  if (family == "burgers") return burgers(label);
  if (family == "lame") return lame(label);
  throw std::invalid_argument("unknown problem '" + family + "' (klein_gordon, burgers, lame)");
}

inline std::vector<std::string> all_cases() {
  return {"klein_gordon:I", "klein_gordon:II", "klein_gordon:III", "burgers:I", "burgers:II",
          "burgers:III",    "lame:I",          "lame:II",          "lame:III",  "lame:IV",
          "lame:V"};
}

}  // namespace pinnevo::problems
