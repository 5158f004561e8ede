#pragma once

// Textbook closed forms, written independently of the library.

#include <cmath>

namespace oracle {

inline double phi(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

inline double bs_call(double S, double K, double sigma, double r, double tau) {
    const double sd = sigma * std::sqrt(tau);
    const double d1 = (std::log(S / K) + (r + sigma * sigma / 2.0) * tau) / sd;
    return S * phi(d1) - K * std::exp(-r * tau) * phi(d1 - sd);
}

inline double bs_put(double S, double K, double sigma, double r, double tau) {
    return bs_call(S, K, sigma, r, tau) - S + K * std::exp(-r * tau);
}

/// Discounted Gaussian density of the log-price after tau.
inline double bs_kernel(double x, double x_prime, double sigma, double r, double tau) {
    const double v = sigma * sigma * tau;
    const double m = x + (r - sigma * sigma / 2.0) * tau;
    return std::exp(-r * tau) * std::exp(-(x_prime - m) * (x_prime - m) / (2.0 * v)) /
           std::sqrt(2.0 * M_PI * v);
}

/// Reflection exponent of the image method for a lower barrier.
inline double image_exponent(double sigma, double r) { return 1.0 - 2.0 * r / (sigma * sigma); }

/// Down-and-out call, barrier B <= K: C(S) - (S/B)^(1 - 2r/sigma^2) C(B^2/S).
inline double down_and_out_call(double S, double K, double B, double sigma, double r, double tau) {
    if (S <= B) return 0.0;
    return bs_call(S, K, sigma, r, tau) -
           std::pow(S / B, image_exponent(sigma, r)) * bs_call(B * B / S, K, sigma, r, tau);
}

/// Dirichlet box eigenvalues of -(sigma^2/2) d^2 + delta on an interval of length L.
inline double box_eigenvalue(int k, double L, double sigma, double delta) {
    return delta + sigma * sigma * k * k * M_PI * M_PI / (2.0 * L * L);
}

}  // namespace oracle
