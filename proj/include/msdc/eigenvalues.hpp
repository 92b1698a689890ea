#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace msdc {

/// All eigenvalues of a dense real matrix: balancing, Householder reduction
/// to upper Hessenberg form, then Francis double-shift QR. Complex pairs come
/// out as conjugates. Throws NumericError (with a hash of the input matrix)
/// if the QR iteration fails to deflate.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

/// max |lambda| over eigenvalues().
double spectral_radius(const Eigen::MatrixXd& m);

/// FNV-1a over the raw entries; used to tag numeric errors for reproduction.
std::uint64_t matrix_hash(const Eigen::MatrixXd& m);

}  // namespace msdc
