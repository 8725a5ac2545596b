#ifndef CONOSHOCK_FFT_HPP
#define CONOSHOCK_FFT_HPP

#include <complex>
#include <vector>

namespace conoshock {

// In-place complex DFT, e^{-i 2 pi n k / N} convention, unnormalized.
void fft_forward(std::vector<std::complex<double>>& a);

// In-place inverse DFT, normalized by 1/N.
void fft_inverse(std::vector<std::complex<double>>& a);

// Frequency of bin m for N samples with spacing h (signed, standard layout).
double fft_frequency(int m, int n, double h);

}  // namespace conoshock

#endif
