#include "spixct/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace spixct::fft {

namespace {

constexpr double kPi = 3.14159265358979323846;
using cd = std::complex<double>;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, bit-reversal permutation first.
void fft_pow2(std::vector<cd>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (cd& x : a) x *= inv;
    }
}

// Bluestein's chirp-z algorithm: DFT of arbitrary length via a power-of-two
// cyclic convolution. k^2 is reduced mod 2n before the trig call.
void fft_bluestein(std::vector<cd>& a, bool inverse) {
    const size_t n = a.size();
    size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    std::vector<cd> chirp(n);
    for (size_t k = 0; k < n; ++k) {
        const long long k2 = static_cast<long long>(k) * static_cast<long long>(k) %
                             (2 * static_cast<long long>(n));
        const double ang = (inverse ? 1.0 : -1.0) * kPi * static_cast<double>(k2) /
                           static_cast<double>(n);
        chirp[k] = cd(std::cos(ang), std::sin(ang));
    }

    std::vector<cd> x(m, cd(0.0, 0.0)), y(m, cd(0.0, 0.0));
    for (size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    y[0] = std::conj(chirp[0]);
    for (size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);

    fft_pow2(x, false);
    fft_pow2(y, false);
    for (size_t i = 0; i < m; ++i) x[i] *= y[i];
    fft_pow2(x, true);

    for (size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (cd& v : a) v *= inv;
    }
}

}  // namespace

void transform(std::vector<cd>& a, bool inverse) {
    if (a.size() <= 1) return;
    if (is_pow2(a.size()))
        fft_pow2(a, inverse);
    else
        fft_bluestein(a, inverse);
}

void transform_2d(std::vector<cd>& a, int rows, int cols, bool inverse) {
    if (a.size() != static_cast<size_t>(rows) * cols)
        throw std::invalid_argument("transform_2d: size mismatch");
    std::vector<cd> tmp;
    tmp.resize(cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) tmp[c] = a[static_cast<size_t>(r) * cols + c];
        transform(tmp, inverse);
        for (int c = 0; c < cols; ++c) a[static_cast<size_t>(r) * cols + c] = tmp[c];
    }
    tmp.resize(rows);
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) tmp[r] = a[static_cast<size_t>(r) * cols + c];
        transform(tmp, inverse);
        for (int r = 0; r < rows; ++r) a[static_cast<size_t>(r) * cols + c] = tmp[r];
    }
}

}  // namespace spixct::fft
