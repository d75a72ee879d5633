#include "sqg/fields.hpp"
#include "sqg/grid.hpp"

#include <string>

namespace sqg {

Grid2D::Grid2D(int n_points, double box_length) : n_(n_points), length_(box_length) {
    if (n_points < 16 || (n_points & (n_points - 1)) != 0)
        throw InvalidGrid("grid needs a power-of-two point count >= 16, got " +
                          std::to_string(n_points));
    if (!(box_length > 0.0) || !std::isfinite(box_length))
        throw InvalidGrid("box length must be positive and finite");
}

Eigen::ArrayXd Grid2D::coordinates() const {
    Eigen::ArrayXd x(n_);
    for (int i = 0; i < n_; ++i) x(i) = coordinate(i);
    return x;
}

Eigen::ArrayXd Grid2D::wavenumbers() const {
    Eigen::ArrayXd k(n_);
    for (int i = 0; i < n_; ++i) k(i) = wavenumber(i);
    return k;
}

PhysicalField::PhysicalField(Grid2D grid, RealArray values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.rows() != grid_.n() || values_.cols() != grid_.n())
        throw InvalidGrid("field shape does not match its grid");
    if (!values_.isFinite().all()) throw NonFiniteField("physical field has NaN/Inf entries");
}

SpectralField::SpectralField(Grid2D grid, ComplexArray coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() != grid_.n() || coeffs_.cols() != grid_.n())
        throw InvalidGrid("spectrum shape does not match its grid");
}

double SpectralField::hermitian_defect() const {
    const int n = grid_.n();
    double defect = 0.0;
    double norm = 0.0;
    for (int j = 0; j < n; ++j) {
        const int jm = grid_.mirror_index(j);
        for (int i = 0; i < n; ++i) {
            defect += std::norm(coeffs_(i, j) - std::conj(coeffs_(grid_.mirror_index(i), jm)));
            norm += std::norm(coeffs_(i, j));
        }
    }
    return norm == 0.0 ? 0.0 : 0.5 * std::sqrt(defect / norm);
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    if (!(grid_ == other.grid_)) throw InvalidGrid("adding spectra on different grids");
    coeffs_ += other.coeffs_;
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    if (!(grid_ == other.grid_)) throw InvalidGrid("subtracting spectra on different grids");
    coeffs_ -= other.coeffs_;
    return *this;
}

}  // namespace sqg
