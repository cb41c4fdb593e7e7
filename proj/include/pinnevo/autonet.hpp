#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pinnevo/detail/random.hpp"
#include "pinnevo/exprtree/tree.hpp"
#include "pinnevo/genome.hpp"

namespace pinnevo::autonet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Which input derivatives travel with the value. Matrices holding jets are
/// laid out as `rows x (components * N)`: component block c occupies columns
/// [c*N, (c+1)*N). Component 0 is the value, then one block per entry of
/// `first`, then one per entry of `second`.
struct JetSpec {
  int dims = 0;
  std::vector<int> first;
  std::vector<std::array<int, 2>> second;

  /// Normalizes the request: pairs are ordered (i <= j), duplicates dropped,
  /// and every dimension used by a pair also gets a first-derivative block.
  static JetSpec make(int dims, std::vector<int> first = {},
                      std::vector<std::array<int, 2>> second = {}) {
    JetSpec s;
    s.dims = dims;
    auto add_first = [&](int d) {
      if (d < 0 || d >= dims) throw std::invalid_argument("derivative index out of range");
      if (std::find(s.first.begin(), s.first.end(), d) == s.first.end()) s.first.push_back(d);
    };
    for (int d : first) add_first(d);
    for (auto p : second) {
      if (p[0] > p[1]) std::swap(p[0], p[1]);
      add_first(p[0]);
      add_first(p[1]);
      if (std::find(s.second.begin(), s.second.end(), p) == s.second.end()) s.second.push_back(p);
    }
    return s;
  }

  int components() const { return 1 + static_cast<int>(first.size() + second.size()); }

  /// Component index of d/dx_d, or -1.
  int first_slot(int d) const {
    for (std::size_t k = 0; k < first.size(); ++k)
      if (first[k] == d) return 1 + static_cast<int>(k);
    return -1;
  }

  /// Component index of d2/dx_i dx_j, or -1.
  int second_slot(int i, int j) const {
    if (i > j) std::swap(i, j);
    for (std::size_t k = 0; k < second.size(); ++k)
      if (second[k][0] == i && second[k][1] == j)
        return 1 + static_cast<int>(first.size() + k);
    return -1;
  }
};

/// Offsets of every block inside the flat parameter vector θ.
struct Layout {
  int num_layers = 0, width = 0, input_dim = 0, output_dim = 0;
  int act_params = 0;              // per hidden layer
  std::vector<Eigen::Index> w_off, b_off;
  std::vector<int> rows, cols;     // affine shapes, rows = fan_out
  Eigen::Index proj_off = -1;      // projection for a shortcut leaving the input
  Eigen::Index act_off = 0;        // (num_layers - 1) copies of the activation parameters
  Eigen::Index total = 0;

  std::string describe() const {
    std::string s;
    for (int k = 0; k < num_layers; ++k)
      s += "W" + std::to_string(k) + "[" + std::to_string(rows[k]) + "x" + std::to_string(cols[k]) +
           "]@" + std::to_string(w_off[k]) + " b" + std::to_string(k) + "@" +
           std::to_string(b_off[k]) + "; ";
    if (proj_off >= 0)
      s += "P[" + std::to_string(width) + "x" + std::to_string(input_dim) + "]@" +
           std::to_string(proj_off) + "; ";
    s += "act[" + std::to_string(num_layers - 1) + "x" + std::to_string(act_params) + "]@" +
         std::to_string(act_off) + "; total " + std::to_string(total);
    return s;
  }
};

/// Everything the reverse sweep needs from a forward pass.
struct Tape {
  JetSpec spec;
  Eigen::Index points = 0;
  std::vector<Matrix> H;  // H[k]: input of layer k (H[0] is the coordinate jet)
  std::vector<Matrix> Z;  // pre-activations of the hidden layers
  std::vector<exprtree::ActivationBatch> act;
  Matrix Y;               // output jet
  bool finite = true;
};

class Network {
 public:
  Network(const genome::Genome& g, int input_dim, int output_dim)
      : structure_(g.structure), tree_(g.activation), init_act_(g.params) {
    const auto violations = genome::validate_genome(g);
    if (!violations.empty()) throw std::invalid_argument("invalid genome: " + violations.front());
    if (input_dim < 1 || output_dim < 1) throw std::invalid_argument("bad network dimensions");
    Layout& L = layout_;
    L.num_layers = g.structure.num_layers;
    L.width = g.structure.hidden_width;
    L.input_dim = input_dim;
    L.output_dim = output_dim;
    L.act_params = g.activation.param_count();
    Eigen::Index off = 0;
    for (int k = 0; k < L.num_layers; ++k) {
      const int in = k == 0 ? input_dim : L.width;
      const int out = k == L.num_layers - 1 ? output_dim : L.width;
      L.rows.push_back(out);
      L.cols.push_back(in);
      L.w_off.push_back(off);
      off += static_cast<Eigen::Index>(in) * out;
      L.b_off.push_back(off);
      off += out;
    }
    for (const auto& s : structure_.shortcuts)
      if (s.start == 0 && L.width != input_dim) {
        L.proj_off = off;
        off += static_cast<Eigen::Index>(L.width) * input_dim;
      }
    L.act_off = off;
    off += static_cast<Eigen::Index>(L.num_layers - 1) * L.act_params;
    L.total = off;
    incoming_.assign(L.num_layers, {});
    for (const auto& s : structure_.shortcuts) incoming_[s.end].push_back(s.start);
  }

  const Layout& layout() const { return layout_; }
  Eigen::Index param_count() const { return layout_.total; }
  const exprtree::ActivationTree& activation() const { return tree_; }
  const genome::StructureGene& structure() const { return structure_; }

  /// Kaiming-uniform weights, zero biases, activation parameters from the genome.
  template <class R>
  Vector init_params(R& rng) const {
    const Layout& L = layout_;
    Vector theta = Vector::Zero(L.total);
    auto fill = [&](Eigen::Index off, Eigen::Index count, int fan_in) {
      const double bound = std::sqrt(6.0 / fan_in);
      for (Eigen::Index i = 0; i < count; ++i) theta[off + i] = uniform_real(rng, -bound, bound);
    };
    for (int k = 0; k < L.num_layers; ++k)
      fill(L.w_off[k], static_cast<Eigen::Index>(L.rows[k]) * L.cols[k], L.cols[k]);
    if (L.proj_off >= 0) fill(L.proj_off, static_cast<Eigen::Index>(L.width) * L.input_dim, L.input_dim);
    for (int k = 0; k + 1 < L.num_layers; ++k)
      for (int p = 0; p < L.act_params; ++p) theta[L.act_off + k * L.act_params + p] = init_act_[p];
    return theta;
  }

  /// Forward sweep of the coordinate jet through the network. `param_grads`
  /// keeps what a later backward() needs for activation-parameter gradients.
  bool forward(const Vector& theta, const Matrix& X, const JetSpec& spec, Tape& tape,
               bool param_grads = true) const {
    const Layout& L = layout_;
    check_theta(theta);
    if (X.rows() != L.input_dim) throw std::invalid_argument("point dimension mismatch");
    if (spec.dims != L.input_dim) throw std::invalid_argument("jet spec dimension mismatch");
    const Eigen::Index N = X.cols();
    const int C = spec.components();
    tape.spec = spec;
    tape.points = N;
    tape.finite = true;
    tape.H.resize(L.num_layers);
    tape.Z.resize(L.num_layers - 1);
    tape.act.resize(L.num_layers - 1);

    Matrix& H0 = tape.H[0];
    H0.setZero(L.input_dim, C * N);
    H0.leftCols(N) = X;
    for (std::size_t f = 0; f < spec.first.size(); ++f)
      H0.block(spec.first[f], (1 + f) * N, 1, N).setOnes();

    for (int k = 0; k + 1 < L.num_layers; ++k) {
      Matrix& Z = tape.Z[k];
      Z.noalias() = weight(theta, k) * tape.H[k];
      Z.leftCols(N).colwise() += bias(theta, k);
      auto& act = tape.act[k];
      exprtree::eval_batch(tree_, act_params(theta, k),
                           std::span<const double>(Z.data(), static_cast<std::size_t>(L.width * N)),
                           param_grads, act);
      if (!act.finite) tape.finite = false;
      Matrix& A = tape.H[k + 1];
      A.resize(L.width, C * N);
      activate(Z, act, spec, N, A);
      for (int src : incoming_[k + 1]) {
        if (src == 0 && L.proj_off >= 0) A.noalias() += projection(theta) * tape.H[0];
        else A += tape.H[src];
      }
    }
    const int last = L.num_layers - 1;
    tape.Y.noalias() = weight(theta, last) * tape.H[last];
    tape.Y.leftCols(N).colwise() += bias(theta, last);
    if (!tape.Y.allFinite()) tape.finite = false;
    return tape.finite;
  }

  /// Reverse sweep: accumulates d(sum Ybar . Y)/dθ into `grad`.
  void backward(const Vector& theta, const Tape& tape, const Matrix& Ybar, Vector& grad) const {
    const Layout& L = layout_;
    const Eigen::Index N = tape.points;
    const JetSpec& spec = tape.spec;
    if (grad.size() != L.total) grad = Vector::Zero(L.total);
    if (Ybar.rows() != tape.Y.rows() || Ybar.cols() != tape.Y.cols())
      throw std::invalid_argument("adjoint shape mismatch");
    const int last = L.num_layers - 1;
    std::vector<Matrix> Hbar(L.num_layers);
    grad_weight(grad, last).noalias() += Ybar * tape.H[last].transpose();
    grad_bias(grad, last) += Ybar.leftCols(N).rowwise().sum();
    Hbar[last].noalias() = weight(theta, last).transpose() * Ybar;

    Matrix Zbar;
    for (int k = last - 1; k >= 0; --k) {
      const Matrix& Hb = Hbar[k + 1];
      for (int src : incoming_[k + 1]) {
        if (src == 0 && L.proj_off >= 0) {
          grad_projection(grad).noalias() += Hb * tape.H[0].transpose();
        } else if (src > 0) {
          if (Hbar[src].size() == 0) Hbar[src] = Hb;
          else Hbar[src] += Hb;
        }
      }
      activate_adjoint(tape.Z[k], tape.act[k], spec, N, Hb, Zbar,
                       grad.segment(L.act_off + static_cast<Eigen::Index>(k) * L.act_params,
                                    L.act_params));
      grad_weight(grad, k).noalias() += Zbar * tape.H[k].transpose();
      grad_bias(grad, k) += Zbar.leftCols(N).rowwise().sum();
      if (k > 0) {
        if (Hbar[k].size() == 0) Hbar[k].noalias() = weight(theta, k).transpose() * Zbar;
        else Hbar[k].noalias() += weight(theta, k).transpose() * Zbar;
      }
      Hbar[k + 1].resize(0, 0);
    }
  }

  /// Plain network outputs (output_dim x N), evaluated in chunks.
  Matrix values(const Vector& theta, const Matrix& X, bool* finite = nullptr) const {
    const JetSpec spec = JetSpec::make(layout_.input_dim);
    Matrix out(layout_.output_dim, X.cols());
    Tape tape;
    bool ok = true;
    constexpr Eigen::Index chunk = 8192;
    for (Eigen::Index s = 0; s < X.cols(); s += chunk) {
      const Eigen::Index n = std::min(chunk, X.cols() - s);
      ok = forward(theta, X.middleCols(s, n), spec, tape, false) && ok;
      out.middleCols(s, n) = tape.Y;
    }
    if (finite) *finite = ok;
    return out;
  }

  // --- parameter views ---

  Eigen::Map<const Matrix> weight(const Vector& t, int k) const {
    return {t.data() + layout_.w_off[k], layout_.rows[k], layout_.cols[k]};
  }
  Eigen::Map<const Vector> bias(const Vector& t, int k) const {
    return {t.data() + layout_.b_off[k], layout_.rows[k]};
  }
  Eigen::Map<const Matrix> projection(const Vector& t) const {
    return {t.data() + layout_.proj_off, layout_.width, layout_.input_dim};
  }
  std::span<const double> act_params(const Vector& t, int k) const {
    return {t.data() + layout_.act_off + static_cast<Eigen::Index>(k) * layout_.act_params,
            static_cast<std::size_t>(layout_.act_params)};
  }

 private:
  void check_theta(const Vector& theta) const {
    if (theta.size() != layout_.total)
      throw std::invalid_argument("parameter vector has " + std::to_string(theta.size()) +
                                  " entries, network expects " + std::to_string(layout_.total));
  }

  Eigen::Map<Matrix> grad_weight(Vector& g, int k) const {
    return {g.data() + layout_.w_off[k], layout_.rows[k], layout_.cols[k]};
  }
  Eigen::Map<Vector> grad_bias(Vector& g, int k) const {
    return {g.data() + layout_.b_off[k], layout_.rows[k]};
  }
  Eigen::Map<Matrix> grad_projection(Vector& g) const {
    return {g.data() + layout_.proj_off, layout_.width, layout_.input_dim};
  }

  using Arr = Eigen::Map<const Eigen::ArrayXXd>;

  // A_0 = s0, A_f = s1 z_f, A_ij = s2 z_i z_j + s1 z_ij
  static void activate(const Matrix& Z, const exprtree::ActivationBatch& a, const JetSpec& spec,
                       Eigen::Index N, Matrix& A) {
    const Eigen::Index w = Z.rows();
    Arr s0(a.s0.data(), w, N), s1(a.s1.data(), w, N), s2(a.s2.data(), w, N);
    auto zb = [&](int c) { return Z.middleCols(c * N, N).array(); };
    auto ab = [&](int c) { return A.middleCols(c * N, N).array(); };
    ab(0) = s0;
    const int F = static_cast<int>(spec.first.size());
    for (int f = 1; f <= F; ++f) ab(f) = s1 * zb(f);
    for (std::size_t p = 0; p < spec.second.size(); ++p) {
      const int c = 1 + F + static_cast<int>(p);
      const int i = spec.first_slot(spec.second[p][0]), j = spec.first_slot(spec.second[p][1]);
      ab(c) = s2 * zb(i) * zb(j) + s1 * zb(c);
    }
  }

  static void activate_adjoint(const Matrix& Z, const exprtree::ActivationBatch& a,
                               const JetSpec& spec, Eigen::Index N, const Matrix& Abar,
                               Matrix& Zbar, Eigen::Ref<Vector> pgrad) {
    const Eigen::Index w = Z.rows();
    Arr s1(a.s1.data(), w, N), s2(a.s2.data(), w, N), s3(a.s3.data(), w, N);
    auto zb = [&](int c) { return Z.middleCols(c * N, N).array(); };
    auto ab = [&](int c) { return Abar.middleCols(c * N, N).array(); };
    Zbar.resize(Z.rows(), Z.cols());
    auto out = [&](int c) { return Zbar.middleCols(c * N, N).array(); };
    const int F = static_cast<int>(spec.first.size());
    const int P = static_cast<int>(spec.second.size());

    // Value block: derivative of every component w.r.t. z0 through s.
    Eigen::ArrayXXd z0bar = s1 * ab(0);
    for (int f = 1; f <= F; ++f) z0bar += s2 * ab(f) * zb(f);
    for (int p = 0; p < P; ++p) {
      const int c = 1 + F + p;
      const int i = spec.first_slot(spec.second[p][0]), j = spec.first_slot(spec.second[p][1]);
      z0bar += ab(c) * (s3 * zb(i) * zb(j) + s2 * zb(c));
    }
    for (int f = 1; f <= F; ++f) out(f) = s1 * ab(f);
    for (int p = 0; p < P; ++p) {
      const int c = 1 + F + p;
      const int i = spec.first_slot(spec.second[p][0]), j = spec.first_slot(spec.second[p][1]);
      out(c) = s1 * ab(c);
      if (i == j) {
        out(i) += 2.0 * s2 * ab(c) * zb(i);
      } else {
        out(i) += s2 * ab(c) * zb(j);
        out(j) += s2 * ab(c) * zb(i);
      }
    }
    out(0) = z0bar;

    for (int q = 0; q < a.params; ++q) {
      Arr d0(a.ds0.data() + q * w * N, w, N), d1(a.ds1.data() + q * w * N, w, N),
          d2(a.ds2.data() + q * w * N, w, N);
      double g = (ab(0) * d0).sum();
      for (int f = 1; f <= F; ++f) g += (ab(f) * d1 * zb(f)).sum();
      for (int p = 0; p < P; ++p) {
        const int c = 1 + F + p;
        const int i = spec.first_slot(spec.second[p][0]), j = spec.first_slot(spec.second[p][1]);
        g += (ab(c) * (d2 * zb(i) * zb(j) + d1 * zb(c))).sum();
      }
      pgrad[q] += g;
    }
  }

  genome::StructureGene structure_;
  exprtree::ActivationTree tree_;
  exprtree::ParamVector init_act_;
  Layout layout_;
  std::vector<std::vector<int>> incoming_;  // shortcut sources per target position
};

/// Jet of every output at a single point.
struct FieldJet {
  JetSpec spec;
  Matrix values;  // output_dim x components
  bool finite = true;

  double value(int out = 0) const { return values(out, 0); }
  double d(int out, int i) const { return values(out, spec.first_slot(i)); }
  double dd(int out, int i, int j) const { return values(out, spec.second_slot(i, j)); }
};

inline FieldJet forward_jet(const Network& net, const Vector& theta, const Vector& point,
                            const JetSpec& spec) {
  Tape tape;
  FieldJet jet;
  jet.spec = spec;
  jet.finite = net.forward(theta, Matrix(point), spec, tape, false);
  jet.values = tape.Y;  // one point: columns are the components
  return jet;
}

/// Gradient over θ of sum(Ybar .* Y) for the jet outputs at points X.
inline Vector param_gradient(const Network& net, const Vector& theta, const Matrix& X,
                             const JetSpec& spec, const Matrix& Ybar) {
  Tape tape;
  if (!net.forward(theta, X, spec, tape, true))
    throw std::domain_error("non-finite network output");
  Vector g = Vector::Zero(net.param_count());
  net.backward(theta, tape, Ybar, g);
  return g;
}

}  // namespace pinnevo::autonet
