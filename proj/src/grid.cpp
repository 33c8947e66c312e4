#include "dissipwave/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace dissipwave {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n_dims, int points, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(n_dims, points, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        std::array<int, 3> dims{points, points, points};
        std::size_t total = 1;
        for (int d = 0; d < n_dims; ++d) total *= static_cast<std::size_t>(points);
        std::vector<Complex> scratch(total);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft(n_dims, dims.data(), buf, buf, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw std::runtime_error("fftw: failed to create plan");
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const Grid& grid, std::vector<Complex>& data, int sign) {
    fftw_plan plan = PlanCache::instance().get(grid.n_dims(), grid.points_per_dim(), sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

}  // namespace

Grid::Grid(int n_dims, int points_per_dim, double half_width)
    : n_dims_(n_dims), points_(points_per_dim), half_width_(half_width), size_(1) {
    if (n_dims < 1 || n_dims > 3)
        throw std::invalid_argument("grid: n_dims must be 1, 2 or 3");
    if (!is_power_of_two(points_per_dim) || points_per_dim < 16)
        throw std::invalid_argument("grid: points_per_dim must be a power of two >= 16, got " +
                                    std::to_string(points_per_dim));
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("grid: half_width must be positive");
    for (int d = 0; d < n_dims; ++d) size_ *= static_cast<std::size_t>(points_per_dim);
}

double Grid::cell_volume() const { return std::pow(dx(), n_dims_); }

double Grid::frequency_step() const { return std::numbers::pi / half_width_; }

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    const auto n = static_cast<std::size_t>(points_);
    for (int d = n_dims_ - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(flat % n);
        flat /= n;
    }
    return idx;
}

std::size_t Grid::flatten(const std::array<int, 3>& idx) const {
    std::size_t flat = 0;
    for (int d = 0; d < n_dims_; ++d)
        flat = flat * static_cast<std::size_t>(points_) + static_cast<std::size_t>(idx[d]);
    return flat;
}

std::vector<double> Grid::squared_frequencies() const {
    std::vector<double> axis(points_);
    for (int k = 0; k < points_; ++k) axis[k] = frequency(k) * frequency(k);
    std::vector<double> out(size_);
    for (std::size_t i = 0; i < size_; ++i) {
        auto idx = unflatten(i);
        double s = 0.0;
        for (int d = 0; d < n_dims_; ++d) s += axis[idx[d]];
        out[i] = s;
    }
    return out;
}

std::vector<double> Grid::squared_radii() const {
    std::vector<double> axis(points_);
    for (int k = 0; k < points_; ++k) axis[k] = coordinate(k) * coordinate(k);
    std::vector<double> out(size_);
    for (std::size_t i = 0; i < size_; ++i) {
        auto idx = unflatten(i);
        double s = 0.0;
        for (int d = 0; d < n_dims_; ++d) s += axis[idx[d]];
        out[i] = s;
    }
    return out;
}

Grid make_grid(int n_dims, int points_per_dim, double half_width) {
    return Grid(n_dims, points_per_dim, half_width);
}

Field::Field(const Grid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

Field::Field(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("field: value count does not match grid");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::domain_error("field: non-finite sample");
}

SpectralField::SpectralField(const Grid& grid) : grid_(grid), coeffs_(grid.size()) {}

SpectralField::SpectralField(const Grid& grid, std::vector<Complex> coefficients)
    : grid_(grid), coeffs_(std::move(coefficients)) {
    if (coeffs_.size() != grid_.size())
        throw std::invalid_argument("spectral field: coefficient count does not match grid");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    if (!(grid_ == other.grid_)) throw std::invalid_argument("spectral field: grid mismatch");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) {
    a += b;
    return a;
}

std::size_t conjugate_mode(const Grid& grid, std::size_t flat) {
    auto idx = grid.unflatten(flat);
    const int n = grid.points_per_dim();
    for (int d = 0; d < grid.n_dims(); ++d) idx[d] = (n - idx[d]) % n;
    return grid.flatten(idx);
}

double hermitian_defect(const SpectralField& f) {
    double scale = 0.0;
    for (auto c : f.coefficients()) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, std::abs(f[i] - std::conj(f[conjugate_mode(f.grid(), i)])));
    return worst / scale;
}

SpectralField forward_transform(const Field& f) {
    std::vector<Complex> data(f.values().begin(), f.values().end());
    execute(f.grid(), data, FFTW_FORWARD);
    return SpectralField(f.grid(), std::move(data));
}

Field inverse_transform(const SpectralField& f) {
    std::vector<Complex> data(f.coefficients().begin(), f.coefficients().end());
    execute(f.grid(), data, FFTW_BACKWARD);
    const double norm = 1.0 / static_cast<double>(f.grid().size());

    double max_abs = 0.0;
    double max_imag = 0.0;
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Complex z = data[i] * norm;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::domain_error("inverse_transform: non-finite output");
        max_abs = std::max(max_abs, std::abs(z));
        max_imag = std::max(max_imag, std::abs(z.imag()));
        out[i] = z.real();
    }
    if (max_imag > 1e-10 * max_abs)
        throw std::domain_error("inverse_transform: imaginary residue " + std::to_string(max_imag) +
                                " exceeds tolerance (input not Hermitian)");
    return Field(f.grid(), std::move(out));
}

SpectralField spectral_derivative(const SpectralField& f, const MultiIndex& alpha) {
    const Grid& grid = f.grid();
    for (int d = 0; d < 3; ++d) {
        if (alpha[d] < 0) throw std::invalid_argument("spectral_derivative: negative order");
        if (d >= grid.n_dims() && alpha[d] != 0)
            throw std::invalid_argument("spectral_derivative: order on a missing axis");
    }
    if (order(alpha) > grid.points_per_dim() / 4)
        throw std::invalid_argument("spectral_derivative: order exceeds N/4");
    if (order(alpha) == 0) return f;

    // Per-axis factors (i xi)^a, with the Nyquist entry zeroed.
    const int n = grid.points_per_dim();
    std::array<std::vector<Complex>, 3> factor;
    for (int d = 0; d < grid.n_dims(); ++d) {
        factor[d].assign(n, Complex(1.0, 0.0));
        if (alpha[d] == 0) continue;
        for (int k = 0; k < n; ++k) {
            factor[d][k] = grid.is_nyquist(k) ? Complex(0.0, 0.0)
                                              : std::pow(Complex(0.0, grid.frequency(k)), alpha[d]);
        }
    }

    SpectralField out(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto idx = grid.unflatten(i);
        Complex m(1.0, 0.0);
        for (int d = 0; d < grid.n_dims(); ++d) m *= factor[d][idx[d]];
        out[i] = f[i] * m;
    }
    return out;
}

Field derivative(const Field& f, const MultiIndex& alpha) {
    return inverse_transform(spectral_derivative(forward_transform(f), alpha));
}

Field cyclic_shift(const Field& f, int cells, int axis) {
    const Grid& grid = f.grid();
    if (axis < 0 || axis >= grid.n_dims()) throw std::invalid_argument("cyclic_shift: bad axis");
    const int n = grid.points_per_dim();
    const int s = ((cells % n) + n) % n;
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto idx = grid.unflatten(i);
        idx[axis] = (idx[axis] + s) % n;
        out[grid.flatten(idx)] = f[i];
    }
    return Field(grid, std::move(out));
}

}  // namespace dissipwave
