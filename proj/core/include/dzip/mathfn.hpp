#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace dzip::nn {

// Base-e exponential on floats built from plain float arithmetic: Cephes-style
// range reduction plus a degree-6 polynomial, branchless, so activation loops
// vectorize and results do not depend on the host libm. Accuracy is a few ulp
// over the clamped domain; exp(0) is exactly 1.
inline float fast_expf(float x) {
  x = std::min(x, 88.02f);
  x = std::max(x, -87.33f);
  const float z = x * 1.44269504088896341f;
  const float n = std::floor(z + 0.5f);
  float r = x - n * 0.693359375f;
  r -= n * -2.12194440e-4f;
  float p = 1.9875691500e-4f;
  p = p * r + 1.3981999507e-3f;
  p = p * r + 8.3334519073e-3f;
  p = p * r + 4.1665795894e-2f;
  p = p * r + 1.6666665459e-1f;
  p = p * r + 5.0000001201e-1f;
  p = p * r * r + r + 1.0f;
  const int ni = static_cast<int>(n);
  const float scale = std::bit_cast<float>(static_cast<uint32_t>(ni + 127) << 23);
  return p * scale;
}

// 32-bit inference must be bit-reproducible across platforms, so the float
// specializations avoid libm; the 64-bit path exists only for gradient checks
// and wants the smooth, accurate libm functions.
template <class T>
T act_exp(T x);
template <>
inline float act_exp<float>(float x) {
  return fast_expf(x);
}
template <>
inline double act_exp<double>(double x) {
  return std::exp(x);
}

template <class T>
inline T act_sigmoid(T x) {
  return T(1) / (T(1) + act_exp<T>(-x));
}

template <class T>
T act_tanh(T x);
template <>
inline float act_tanh<float>(float x) {
  return 1.0f - 2.0f / (fast_expf(2.0f * x) + 1.0f);
}
template <>
inline double act_tanh<double>(double x) {
  return std::tanh(x);
}

}  // namespace dzip::nn
