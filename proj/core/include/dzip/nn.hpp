#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "dzip/mathfn.hpp"
#include "dzip/matrix.hpp"

// Neural kernels with a fixed evaluation order. Encoder and decoder must
// arrive at bit-identical probabilities, so every reduction here runs in
// strictly ascending index order, there is no FMA contraction (enforced by
// build flags), and batched calls treat each row independently: row i of any
// output depends only on row i of the inputs and is computed by the exact
// same instruction sequence regardless of batch size.
namespace dzip::nn {

enum class Activation : uint8_t { Identity, Relu, Sigmoid, Tanh };

template <class T>
struct Param {
  Matrix<T> value, grad, adam_m, adam_v;
  Param() = default;
  Param(size_t rows, size_t cols) : value(rows, cols), grad(rows, cols), adam_m(rows, cols), adam_v(rows, cols) {}
  size_t count() const { return value.size(); }
};

struct AdamHyper {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  uint64_t step_count = 0;
};

// C[r,j] += sum_i A[r,i] * Bt[i,j], i ascending for every (r,j).
// Bt is the right operand already transposed so the inner loops run along
// contiguous rows. The column blocking keeps a register tile per row; it
// changes only which (r,j) cells are in flight, never the i order.
template <class T>
void matmul_acc(const Matrix<T>& A, const Matrix<T>& Bt, Matrix<T>& C) {
  require_dim(A.rows() == C.rows() && A.cols() == Bt.rows() && Bt.cols() == C.cols(),
              "matmul_acc: shape mismatch");
  const size_t b = A.rows(), n = A.cols(), m = Bt.cols();
  constexpr size_t kBlock = 32;
  for (size_t r = 0; r < b; ++r) {
    const T* a = A.row(r);
    T* c = C.row(r);
    size_t j0 = 0;
    for (; j0 + kBlock <= m; j0 += kBlock) {
      T acc[kBlock];
      for (size_t u = 0; u < kBlock; ++u) acc[u] = c[j0 + u];
      for (size_t i = 0; i < n; ++i) {
        const T av = a[i];
        const T* brow = Bt.row(i) + j0;
        for (size_t u = 0; u < kBlock; ++u) acc[u] += av * brow[u];
      }
      for (size_t u = 0; u < kBlock; ++u) c[j0 + u] = acc[u];
    }
    for (size_t i = 0; i < n && j0 < m; ++i) {
      const T av = a[i];
      const T* brow = Bt.row(i);
      for (size_t u = j0; u < m; ++u) c[u] += av * brow[u];
    }
  }
}

// G[j,i] += sum_r U[r,j] * X[r,i], r ascending for every (j,i).
template <class T>
void outer_acc(const Matrix<T>& U, const Matrix<T>& X, Matrix<T>& G) {
  require_dim(U.rows() == X.rows() && G.rows() == U.cols() && G.cols() == X.cols(),
              "outer_acc: shape mismatch");
  const size_t b = U.rows(), m = U.cols(), n = X.cols();
  constexpr size_t kBlock = 32;
  for (size_t j = 0; j < m; ++j) {
    T* g = G.row(j);
    size_t i0 = 0;
    for (; i0 + kBlock <= n; i0 += kBlock) {
      T acc[kBlock];
      for (size_t u = 0; u < kBlock; ++u) acc[u] = g[i0 + u];
      for (size_t r = 0; r < b; ++r) {
        const T uv = U(r, j);
        const T* x = X.row(r) + i0;
        for (size_t u = 0; u < kBlock; ++u) acc[u] += uv * x[u];
      }
      for (size_t u = 0; u < kBlock; ++u) g[i0 + u] = acc[u];
    }
    for (size_t r = 0; r < b && i0 < n; ++r) {
      const T uv = U(r, j);
      const T* x = X.row(r);
      for (size_t u = i0; u < n; ++u) g[u] += uv * x[u];
    }
  }
}

// g[0,j] += sum_r U[r,j], r ascending.
template <class T>
void colsum_acc(const Matrix<T>& U, Matrix<T>& g) {
  require_dim(g.rows() == 1 && g.cols() == U.cols(), "colsum_acc: shape mismatch");
  T* out = g.row(0);
  for (size_t r = 0; r < U.rows(); ++r) {
    const T* u = U.row(r);
    for (size_t j = 0; j < U.cols(); ++j) out[j] += u[j];
  }
}

template <class T>
Matrix<T> transpose(const Matrix<T>& A) {
  Matrix<T> out(A.cols(), A.rows());
  for (size_t r = 0; r < A.rows(); ++r)
    for (size_t c = 0; c < A.cols(); ++c) out(c, r) = A(r, c);
  return out;
}

template <class T>
void tile_rows_into(const Matrix<T>& rowvec, size_t rows, Matrix<T>& out) {
  require_dim(rowvec.rows() == 1, "tile_rows_into: want a 1-row matrix");
  out.resize(rows, rowvec.cols());
  for (size_t r = 0; r < rows; ++r) {
    const T* src = rowvec.row(0);
    T* dst = out.row(r);
    for (size_t c = 0; c < rowvec.cols(); ++c) dst[c] = src[c];
  }
}

template <class T>
void apply_activation(Matrix<T>& m, Activation act) {
  T* d = m.data();
  const size_t n = m.size();
  switch (act) {
    case Activation::Identity:
      break;
    case Activation::Relu:
      for (size_t i = 0; i < n; ++i) d[i] = std::max(d[i], T(0));
      break;
    case Activation::Sigmoid:
      for (size_t i = 0; i < n; ++i) d[i] = act_sigmoid(d[i]);
      break;
    case Activation::Tanh:
      for (size_t i = 0; i < n; ++i) d[i] = act_tanh(d[i]);
      break;
  }
}

template <class T>
struct DenseCache {
  Activation act = Activation::Identity;
  Matrix<T> preact;
};

// out = act(X * W^T + b). Per element the sum runs: bias, then the input
// products in ascending index order. wt, when given, must equal transpose(W);
// callers on hot paths keep one around instead of re-transposing per call.
template <class T>
void dense_forward_t(const Matrix<T>& X, const Matrix<T>& wt, const Matrix<T>& b, Activation act,
                     std::type_identity_t<DenseCache<T>>* cache, Matrix<T>& out) {
  require_dim(wt.rows() == X.cols() && b.rows() == 1 && b.cols() == wt.cols(),
              "dense_forward: shape mismatch");
  tile_rows_into(b, X.rows(), out);
  matmul_acc(X, wt, out);
  if (cache) {
    cache->act = act;
    cache->preact = out;
  }
  apply_activation(out, act);
}

template <class T>
void dense_forward(const Matrix<T>& X, const Matrix<T>& W, const Matrix<T>& b, Activation act,
                   std::type_identity_t<DenseCache<T>>* cache, Matrix<T>& out) {
  const Matrix<T> wt = transpose(W);
  dense_forward_t(X, wt, b, act, cache, out);
}

template <class T>
Matrix<T> dense_forward(const Matrix<T>& X, const Matrix<T>& W, const Matrix<T>& b, Activation act,
                        std::type_identity_t<DenseCache<T>>* cache = nullptr) {
  Matrix<T> out;
  dense_forward(X, W, b, act, cache, out);
  return out;
}

template <class T>
void scale_by_activation_grad(Matrix<T>& dZ, const DenseCache<T>& cache) {
  require_dim(dZ.same_shape(cache.preact), "dense_backward: cache shape mismatch");
  T* d = dZ.data();
  const T* a = cache.preact.data();
  switch (cache.act) {
    case Activation::Identity:
      break;
    case Activation::Relu:
      for (size_t i = 0; i < dZ.size(); ++i) d[i] = a[i] > T(0) ? d[i] : T(0);
      break;
    case Activation::Sigmoid:
      for (size_t i = 0; i < dZ.size(); ++i) {
        const T y = act_sigmoid(a[i]);
        d[i] *= y * (T(1) - y);
      }
      break;
    case Activation::Tanh:
      for (size_t i = 0; i < dZ.size(); ++i) {
        const T y = act_tanh(a[i]);
        d[i] *= T(1) - y * y;
      }
      break;
  }
}

// Gradients accumulate additively into wgrad/bgrad (ascending sample order).
// Returns nothing into dX when dx == nullptr (saves the input-layer pass).
template <class T>
void dense_backward(const Matrix<T>& dY, const Matrix<T>& X, const Matrix<T>& W,
                    const DenseCache<T>& cache, Matrix<T>& wgrad, Matrix<T>& bgrad, std::type_identity_t<Matrix<T>>* dx) {
  require_dim(dY.rows() == X.rows() && dY.cols() == W.rows() && W.cols() == X.cols(),
              "dense_backward: shape mismatch");
  require_dim(wgrad.same_shape(W) && bgrad.rows() == 1 && bgrad.cols() == W.rows(),
              "dense_backward: grad shape mismatch");
  if (cache.preact.empty()) throw Error("dense_backward: forward cache missing");
  Matrix<T> dZ = dY;
  scale_by_activation_grad(dZ, cache);
  outer_acc(dZ, X, wgrad);
  colsum_acc(dZ, bgrad);
  if (dx) {
    dx->resize_zero(X.rows(), X.cols());
    matmul_acc(dZ, W, *dx);
  }
}

// Rows are softmaxed independently with max subtraction; exponent arguments
// are therefore <= 0 and the sum is >= 1.
template <class T>
void softmax_into(const Matrix<T>& Z, Matrix<T>& out) {
  out.resize(Z.rows(), Z.cols());
  for (size_t r = 0; r < Z.rows(); ++r) {
    const T* z = Z.row(r);
    T* o = out.row(r);
    T mx = z[0];
    for (size_t c = 1; c < Z.cols(); ++c) mx = std::max(mx, z[c]);
    T sum = T(0);
    for (size_t c = 0; c < Z.cols(); ++c) {
      o[c] = act_exp<T>(z[c] - mx);
      sum += o[c];
    }
    const T inv = T(1) / sum;
    for (size_t c = 0; c < Z.cols(); ++c) o[c] *= inv;
  }
}

template <class T>
Matrix<T> softmax(const Matrix<T>& Z) {
  Matrix<T> out;
  softmax_into(Z, out);
  return out;
}

inline constexpr double kMinProb = 0x1p-64;

// Mean bits per symbol: (1/batch) * sum_r log2(1/p[r, target_r]), clamped.
template <class T>
double cross_entropy(std::span<const uint8_t> targets, const Matrix<T>& P) {
  require_dim(targets.size() == P.rows(), "cross_entropy: target count mismatch");
  double acc = 0;
  for (size_t r = 0; r < P.rows(); ++r) {
    const double p = std::max(static_cast<double>(P(r, targets[r])), kMinProb);
    acc -= std::log2(p);
  }
  return acc / static_cast<double>(P.rows());
}

// One-hot-matrix form of the same loss.
template <class T>
double cross_entropy(const Matrix<T>& Y, const Matrix<T>& P) {
  require_dim(Y.same_shape(P), "cross_entropy: shape mismatch");
  double acc = 0;
  for (size_t r = 0; r < P.rows(); ++r)
    for (size_t c = 0; c < P.cols(); ++c) {
      const double p = std::max(static_cast<double>(P(r, c)), kMinProb);
      acc -= static_cast<double>(Y(r, c)) * std::log2(p);
    }
  return acc / static_cast<double>(P.rows());
}

// Fused gradient of cross_entropy(Y, softmax(Z)) with respect to Z:
// (P - Y) / (batch * ln 2).
template <class T>
void cross_entropy_softmax_backward(std::span<const uint8_t> targets, const Matrix<T>& P,
                                    Matrix<T>& dZ) {
  require_dim(targets.size() == P.rows(), "cross_entropy_softmax_backward: target count mismatch");
  const T scale = T(1) / (static_cast<T>(P.rows()) * T(0.6931471805599453));
  dZ.resize(P.rows(), P.cols());
  for (size_t r = 0; r < P.rows(); ++r) {
    const T* p = P.row(r);
    T* d = dZ.row(r);
    for (size_t c = 0; c < P.cols(); ++c) d[c] = p[c] * scale;
    d[targets[r]] -= scale;
  }
}

// ---- GRU cell ----
// z = sig(x W_z^T + h U_z^T + b_z)
// r = sig(x W_r^T + h U_r^T + b_r)
// hc = tanh(x W_h^T + (r . h) U_h^T + b_h)
// h' = (1 - z) . h + z . hc
// Per preactivation element the sum order is: bias, input products (ascending),
// recurrent products (ascending).
template <class T>
struct GruCellParams {
  Param<T> w_z, u_z, b_z, w_r, u_r, b_r, w_h, u_h, b_h;
  GruCellParams() = default;
  GruCellParams(size_t d_in, size_t d_h)
      : w_z(d_h, d_in), u_z(d_h, d_h), b_z(1, d_h),
        w_r(d_h, d_in), u_r(d_h, d_h), b_r(1, d_h),
        w_h(d_h, d_in), u_h(d_h, d_h), b_h(1, d_h) {}
  std::array<Param<T>*, 9> list() {
    return {&w_z, &u_z, &b_z, &w_r, &u_r, &b_r, &w_h, &u_h, &b_h};
  }
};

template <class T>
struct GruStepCache {
  Matrix<T> z, r, rh, hcand;
};

// Transposed copies of the cell weights, kept by callers that run many steps
// against the same values; refresh() after every weight update.
template <class T>
struct GruCellXposed {
  Matrix<T> w_z, u_z, w_r, u_r, w_h, u_h;
  void refresh(const GruCellParams<T>& p) {
    w_z = transpose(p.w_z.value);
    u_z = transpose(p.u_z.value);
    w_r = transpose(p.w_r.value);
    u_r = transpose(p.u_r.value);
    w_h = transpose(p.w_h.value);
    u_h = transpose(p.u_h.value);
  }
};

// Preactivation sum order per element: bias, input products (ascending),
// recurrent products (ascending). wt/ut are transposed weights.
template <class T>
void gate_preact_t(const Matrix<T>& x, const Matrix<T>& h, const Matrix<T>& wt, const Matrix<T>& ut,
                   const Matrix<T>& b, Matrix<T>& out) {
  tile_rows_into(b, x.rows(), out);
  matmul_acc(x, wt, out);
  matmul_acc(h, ut, out);
}

template <class T>
void gru_cell_forward_t(const Matrix<T>& x, const Matrix<T>& h_prev, const GruCellParams<T>& p,
                        const GruCellXposed<T>& xp, std::type_identity_t<GruStepCache<T>>* cache, Matrix<T>& h_out) {
  require_dim(x.rows() == h_prev.rows() && x.cols() == p.w_z.value.cols() &&
                  h_prev.cols() == p.u_z.value.cols(),
              "gru_cell_forward: shape mismatch");
  GruStepCache<T> local;
  GruStepCache<T>& c = cache ? *cache : local;
  gate_preact_t(x, h_prev, xp.w_z, xp.u_z, p.b_z.value, c.z);
  apply_activation(c.z, Activation::Sigmoid);
  gate_preact_t(x, h_prev, xp.w_r, xp.u_r, p.b_r.value, c.r);
  apply_activation(c.r, Activation::Sigmoid);
  c.rh.resize(h_prev.rows(), h_prev.cols());
  for (size_t i = 0; i < c.rh.size(); ++i) c.rh.data()[i] = c.r.data()[i] * h_prev.data()[i];
  gate_preact_t(x, c.rh, xp.w_h, xp.u_h, p.b_h.value, c.hcand);
  apply_activation(c.hcand, Activation::Tanh);
  h_out.resize(h_prev.rows(), h_prev.cols());
  for (size_t i = 0; i < h_out.size(); ++i) {
    const T z = c.z.data()[i];
    h_out.data()[i] = (T(1) - z) * h_prev.data()[i] + z * c.hcand.data()[i];
  }
}

template <class T>
void gru_cell_forward(const Matrix<T>& x, const Matrix<T>& h_prev, const GruCellParams<T>& p,
                      std::type_identity_t<GruStepCache<T>>* cache, Matrix<T>& h_out) {
  GruCellXposed<T> xp;
  xp.refresh(p);
  gru_cell_forward_t(x, h_prev, p, xp, cache, h_out);
}

template <class T>
Matrix<T> gru_cell_forward(const Matrix<T>& x, const Matrix<T>& h_prev, const GruCellParams<T>& p,
                           std::type_identity_t<GruStepCache<T>>* cache = nullptr) {
  Matrix<T> h;
  gru_cell_forward(x, h_prev, p, cache, h);
  return h;
}

// Parameter grads accumulate; dx (optional) and dh_prev are overwritten.
template <class T>
void gru_cell_backward(const Matrix<T>& dh, const Matrix<T>& x, const Matrix<T>& h_prev,
                       const GruStepCache<T>& c, GruCellParams<T>& p, std::type_identity_t<Matrix<T>>* dx,
                       Matrix<T>& dh_prev) {
  if (c.z.empty()) throw Error("gru_cell_backward: forward cache missing");
  require_dim(dh.same_shape(c.z) && x.rows() == dh.rows() && h_prev.same_shape(c.z),
              "gru_cell_backward: shape mismatch");
  const size_t b = dh.rows(), dh_dim = dh.cols();

  Matrix<T> da_z(b, dh_dim), da_h(b, dh_dim), drh(b, dh_dim), da_r(b, dh_dim);
  dh_prev.resize(b, dh_dim);
  for (size_t i = 0; i < dh.size(); ++i) {
    const T g = dh.data()[i];
    const T z = c.z.data()[i];
    const T hc = c.hcand.data()[i];
    const T hp = h_prev.data()[i];
    da_z.data()[i] = g * (hc - hp) * z * (T(1) - z);
    da_h.data()[i] = g * z * (T(1) - hc * hc);
    dh_prev.data()[i] = g * (T(1) - z);
  }
  // candidate path: drh = da_h * U_h, then split into dr and the h_prev leg
  drh.fill(T(0));
  matmul_acc(da_h, p.u_h.value, drh);
  for (size_t i = 0; i < drh.size(); ++i) {
    const T d = drh.data()[i];
    const T r = c.r.data()[i];
    da_r.data()[i] = d * h_prev.data()[i] * r * (T(1) - r);
    dh_prev.data()[i] += d * r;
  }
  outer_acc(da_z, x, p.w_z.grad);
  outer_acc(da_z, h_prev, p.u_z.grad);
  colsum_acc(da_z, p.b_z.grad);
  outer_acc(da_r, x, p.w_r.grad);
  outer_acc(da_r, h_prev, p.u_r.grad);
  colsum_acc(da_r, p.b_r.grad);
  outer_acc(da_h, x, p.w_h.grad);
  outer_acc(da_h, c.rh, p.u_h.grad);
  colsum_acc(da_h, p.b_h.grad);
  matmul_acc(da_z, p.u_z.value, dh_prev);
  matmul_acc(da_r, p.u_r.value, dh_prev);
  if (dx) {
    dx->resize_zero(b, x.cols());
    matmul_acc(da_z, p.w_z.value, *dx);
    matmul_acc(da_r, p.w_r.value, *dx);
    matmul_acc(da_h, p.w_h.value, *dx);
  }
}

// ---- LSTM cell ----
// i = sig(.), f = sig(.), g = tanh(.), o = sig(.)
// c' = f . c + i . g ;  h' = o . tanh(c')
template <class T>
struct LstmCellParams {
  Param<T> w_i, u_i, b_i, w_f, u_f, b_f, w_g, u_g, b_g, w_o, u_o, b_o;
  LstmCellParams() = default;
  LstmCellParams(size_t d_in, size_t d_h)
      : w_i(d_h, d_in), u_i(d_h, d_h), b_i(1, d_h),
        w_f(d_h, d_in), u_f(d_h, d_h), b_f(1, d_h),
        w_g(d_h, d_in), u_g(d_h, d_h), b_g(1, d_h),
        w_o(d_h, d_in), u_o(d_h, d_h), b_o(1, d_h) {}
  std::array<Param<T>*, 12> list() {
    return {&w_i, &u_i, &b_i, &w_f, &u_f, &b_f, &w_g, &u_g, &b_g, &w_o, &u_o, &b_o};
  }
};

template <class T>
struct LstmStepCache {
  Matrix<T> i, f, g, o, c, tanh_c;
};

template <class T>
struct LstmCellXposed {
  Matrix<T> w_i, u_i, w_f, u_f, w_g, u_g, w_o, u_o;
  void refresh(const LstmCellParams<T>& p) {
    w_i = transpose(p.w_i.value);
    u_i = transpose(p.u_i.value);
    w_f = transpose(p.w_f.value);
    u_f = transpose(p.u_f.value);
    w_g = transpose(p.w_g.value);
    u_g = transpose(p.u_g.value);
    w_o = transpose(p.w_o.value);
    u_o = transpose(p.u_o.value);
  }
};

template <class T>
void lstm_cell_forward_t(const Matrix<T>& x, const Matrix<T>& h_prev, const Matrix<T>& c_prev,
                         const LstmCellParams<T>& p, const LstmCellXposed<T>& xp,
                         std::type_identity_t<LstmStepCache<T>>* cache, Matrix<T>& h_out, Matrix<T>& c_out) {
  require_dim(x.rows() == h_prev.rows() && h_prev.same_shape(c_prev) &&
                  x.cols() == p.w_i.value.cols() && h_prev.cols() == p.u_i.value.cols(),
              "lstm_cell_forward: shape mismatch");
  LstmStepCache<T> local;
  LstmStepCache<T>& c = cache ? *cache : local;
  gate_preact_t(x, h_prev, xp.w_i, xp.u_i, p.b_i.value, c.i);
  apply_activation(c.i, Activation::Sigmoid);
  gate_preact_t(x, h_prev, xp.w_f, xp.u_f, p.b_f.value, c.f);
  apply_activation(c.f, Activation::Sigmoid);
  gate_preact_t(x, h_prev, xp.w_g, xp.u_g, p.b_g.value, c.g);
  apply_activation(c.g, Activation::Tanh);
  gate_preact_t(x, h_prev, xp.w_o, xp.u_o, p.b_o.value, c.o);
  apply_activation(c.o, Activation::Sigmoid);
  c.c.resize(c_prev.rows(), c_prev.cols());
  for (size_t e = 0; e < c.c.size(); ++e)
    c.c.data()[e] = c.f.data()[e] * c_prev.data()[e] + c.i.data()[e] * c.g.data()[e];
  c.tanh_c = c.c;
  apply_activation(c.tanh_c, Activation::Tanh);
  c_out = c.c;
  h_out.resize(c_prev.rows(), c_prev.cols());
  for (size_t e = 0; e < h_out.size(); ++e) h_out.data()[e] = c.o.data()[e] * c.tanh_c.data()[e];
}

template <class T>
void lstm_cell_forward(const Matrix<T>& x, const Matrix<T>& h_prev, const Matrix<T>& c_prev,
                       const LstmCellParams<T>& p, std::type_identity_t<LstmStepCache<T>>* cache, Matrix<T>& h_out,
                       Matrix<T>& c_out) {
  LstmCellXposed<T> xp;
  xp.refresh(p);
  lstm_cell_forward_t(x, h_prev, c_prev, p, xp, cache, h_out, c_out);
}

template <class T>
void lstm_cell_backward(const Matrix<T>& dh, const Matrix<T>& dc_in, const Matrix<T>& x,
                        const Matrix<T>& h_prev, const Matrix<T>& c_prev, const LstmStepCache<T>& c,
                        LstmCellParams<T>& p, std::type_identity_t<Matrix<T>>* dx, Matrix<T>& dh_prev,
                        Matrix<T>& dc_prev) {
  if (c.i.empty()) throw Error("lstm_cell_backward: forward cache missing");
  require_dim(dh.same_shape(c.i) && h_prev.same_shape(c.i) && c_prev.same_shape(c.i),
              "lstm_cell_backward: shape mismatch");
  const size_t b = dh.rows(), dh_dim = dh.cols();
  Matrix<T> da_i(b, dh_dim), da_f(b, dh_dim), da_g(b, dh_dim), da_o(b, dh_dim);
  dc_prev.resize(b, dh_dim);
  const bool have_dc = !dc_in.empty();
  for (size_t e = 0; e < dh.size(); ++e) {
    const T gh = dh.data()[e];
    const T i = c.i.data()[e];
    const T f = c.f.data()[e];
    const T g = c.g.data()[e];
    const T o = c.o.data()[e];
    const T tc = c.tanh_c.data()[e];
    T dc = gh * o * (T(1) - tc * tc);
    if (have_dc) dc += dc_in.data()[e];
    da_i.data()[e] = dc * g * i * (T(1) - i);
    da_f.data()[e] = dc * c_prev.data()[e] * f * (T(1) - f);
    da_g.data()[e] = dc * i * (T(1) - g * g);
    da_o.data()[e] = gh * tc * o * (T(1) - o);
    dc_prev.data()[e] = dc * f;
  }
  outer_acc(da_i, x, p.w_i.grad);
  outer_acc(da_i, h_prev, p.u_i.grad);
  colsum_acc(da_i, p.b_i.grad);
  outer_acc(da_f, x, p.w_f.grad);
  outer_acc(da_f, h_prev, p.u_f.grad);
  colsum_acc(da_f, p.b_f.grad);
  outer_acc(da_g, x, p.w_g.grad);
  outer_acc(da_g, h_prev, p.u_g.grad);
  colsum_acc(da_g, p.b_g.grad);
  outer_acc(da_o, x, p.w_o.grad);
  outer_acc(da_o, h_prev, p.u_o.grad);
  colsum_acc(da_o, p.b_o.grad);
  dh_prev.resize_zero(b, dh_dim);
  matmul_acc(da_i, p.u_i.value, dh_prev);
  matmul_acc(da_f, p.u_f.value, dh_prev);
  matmul_acc(da_g, p.u_g.value, dh_prev);
  matmul_acc(da_o, p.u_o.value, dh_prev);
  if (dx) {
    dx->resize_zero(b, x.cols());
    matmul_acc(da_i, p.w_i.value, *dx);
    matmul_acc(da_f, p.w_f.value, *dx);
    matmul_acc(da_g, p.w_g.value, *dx);
    matmul_acc(da_o, p.w_o.value, *dx);
  }
}

// Bias-corrected Adam. The beta^t corrections are formed by iterated
// multiplication in T so every platform computes the same values; grads are
// zeroed after the update.
template <class T>
void adam_step(std::span<Param<T>* const> params, AdamHyper& h) {
  const uint64_t t = h.step_count + 1;
  const T b1 = static_cast<T>(h.beta1);
  const T b2 = static_cast<T>(h.beta2);
  const T lr = static_cast<T>(h.learning_rate);
  const T eps = static_cast<T>(h.epsilon);
  T b1t = T(1), b2t = T(1);
  for (uint64_t s = 0; s < t; ++s) {
    b1t *= b1;
    b2t *= b2;
  }
  const T c1 = T(1) - b1t;
  const T c2 = T(1) - b2t;
  for (Param<T>* p : params) {
    T* w = p->value.data();
    T* g = p->grad.data();
    T* m = p->adam_m.data();
    T* v = p->adam_v.data();
    for (size_t e = 0; e < p->value.size(); ++e) {
      m[e] = b1 * m[e] + (T(1) - b1) * g[e];
      v[e] = b2 * v[e] + (T(1) - b2) * g[e] * g[e];
      const T mhat = m[e] / c1;
      const T vhat = v[e] / c2;
      w[e] -= lr * mhat / (std::sqrt(vhat) + eps);
      g[e] = T(0);
    }
  }
  h.step_count = t;
}

template <class T>
void adam_step(const std::vector<Param<T>*>& params, AdamHyper& h) {
  adam_step(std::span<Param<T>* const>(params.data(), params.size()), h);
}

}  // namespace dzip::nn
