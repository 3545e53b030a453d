#pragma once

#include <complex>
#include <vector>

namespace flipchain {

using cvec = std::vector<std::complex<double>>;

// f^(k) = sum_x f_x exp(-2 pi i x k), k = j/(n+1). Unnormalized.
cvec dft_forward(const cvec& f);
// f_x = 1/(n+1) sum_k f^(k) exp(2 pi i x k).
cvec dft_inverse(const cvec& fhat);

// Length-checked variants: the vector must have n+1 entries.
cvec dft_forward(const cvec& f, int n);
cvec dft_inverse(const cvec& fhat, int n);

// Unnormalized 2D forward transform of a row-major N x N array:
// out(a,b) = sum_{x,y} f(x,y) exp(-2 pi i (x a + y b)/N).
cvec dft2_forward(const cvec& f, int N);

}  // namespace flipchain
