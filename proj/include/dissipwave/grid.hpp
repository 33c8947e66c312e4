#pragma once

/// @file grid.hpp
/// @brief Periodic grids on [-L, L)^n, real/spectral fields and the DFT contract.
///
/// Samples are stored row-major with the last axis fastest. Spectral
/// coefficients use the standard FFT ordering along every axis: storage index
/// k maps to the lattice index j = k for k < N/2 and j = k - N otherwise, so
/// the lattice is j in [-N/2, N/2) and the angular frequency is xi_j = (pi/L) j.
///
/// Normalization: the forward transform is a plain sum over samples and the
/// inverse carries 1/N per axis. Parseval therefore reads
///
///     sum_x |f(x)|^2 * dx^n  ==  sum_j |F_j|^2 * dx^n / N^n.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dissipwave {

using Complex = std::complex<double>;

/// Derivative orders per axis; unused trailing axes must be zero.
using MultiIndex = std::array<int, 3>;

inline int order(const MultiIndex& alpha) { return alpha[0] + alpha[1] + alpha[2]; }

class Grid {
public:
    Grid(int n_dims, int points_per_dim, double half_width);

    int n_dims() const { return n_dims_; }
    int points_per_dim() const { return points_; }
    double half_width() const { return half_width_; }
    double dx() const { return 2.0 * half_width_ / points_; }

    /// points_per_dim^n_dims
    std::size_t size() const { return size_; }

    /// Physical volume element dx^n.
    double cell_volume() const;

    /// Frequency spacing pi / L.
    double frequency_step() const;

    /// Lattice index j in [-N/2, N/2) for storage index k.
    int lattice_index(int k) const { return k < points_ / 2 ? k : k - points_; }
    double frequency(int k) const { return frequency_step() * lattice_index(k); }
    double coordinate(int k) const { return -half_width_ + k * dx(); }
    bool is_nyquist(int k) const { return k == points_ / 2; }

    /// Per-axis storage indices of a flat index (unused axes are 0).
    std::array<int, 3> unflatten(std::size_t flat) const;
    std::size_t flatten(const std::array<int, 3>& idx) const;

    /// |xi|^2 for every mode, flat layout.
    std::vector<double> squared_frequencies() const;

    /// |x|^2 for every sample point, flat layout.
    std::vector<double> squared_radii() const;

    bool operator==(const Grid&) const = default;

private:
    int n_dims_;
    int points_;
    double half_width_;
    std::size_t size_;
};

/// Validated constructor: n_dims in {1,2,3}, points a power of two >= 16, L > 0.
Grid make_grid(int n_dims, int points_per_dim, double half_width);

class Field {
public:
    explicit Field(const Grid& grid);
    Field(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::size_t size() const { return values_.size(); }

private:
    Grid grid_;
    std::vector<double> values_;
};

class SpectralField {
public:
    explicit SpectralField(const Grid& grid);
    SpectralField(const Grid& grid, std::vector<Complex> coefficients);

    const Grid& grid() const { return grid_; }
    std::span<const Complex> coefficients() const { return coeffs_; }
    std::span<Complex> coefficients() { return coeffs_; }
    Complex operator[](std::size_t i) const { return coeffs_[i]; }
    Complex& operator[](std::size_t i) { return coeffs_[i]; }
    std::size_t size() const { return coeffs_.size(); }

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator*=(double s);

private:
    Grid grid_;
    std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);

/// Flat index of the mode -j for the mode stored at `flat` (Nyquist maps to itself).
std::size_t conjugate_mode(const Grid& grid, std::size_t flat);

/// Largest |F(j) - conj(F(-j))| relative to max |F|; zero for an exact real image.
double hermitian_defect(const SpectralField& f);

SpectralField forward_transform(const Field& f);

/// Throws std::domain_error when the imaginary residue exceeds 1e-10 of the
/// largest output magnitude or the output is not finite.
Field inverse_transform(const SpectralField& f);

/// Multiplies by prod_k (i xi_k)^alpha_k. Along any axis with alpha_k > 0 the
/// Nyquist coefficient is zeroed so real fields stay real and successive
/// derivatives compose exactly. Throws if |alpha| > N/4.
SpectralField spectral_derivative(const SpectralField& f, const MultiIndex& alpha);

/// Convenience: derivative of a real field, returned in physical space.
Field derivative(const Field& f, const MultiIndex& alpha);

/// Cyclic shift by `cells` along axis 0 (positive moves samples to higher indices).
Field cyclic_shift(const Field& f, int cells, int axis = 0);

}  // namespace dissipwave
