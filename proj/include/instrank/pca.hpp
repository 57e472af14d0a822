#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "instrank/dense.hpp"

namespace instrank::pca {

struct PcaModel {
    std::vector<double> mean;         // d
    DenseMatrix components;           // d x K, orthonormal columns
    std::vector<double> eigenvalues;  // all d, non-increasing, clamped >= 0
    std::size_t k = 0;
    double tau = 0.0;

    std::size_t input_dim() const { return mean.size(); }
};

struct EigenDecomposition {
    std::vector<double> values;  // non-increasing
    DenseMatrix vectors;         // columns, same order as values
};

// Cyclic Jacobi rotations on a symmetric matrix; sweeps stop once every
// off-diagonal magnitude is below 1e-12 or after 100 sweeps. Each
// eigenvector is sign-canonicalized (largest-magnitude entry non-negative);
// exactly tied eigenvalues are ordered by eigenvector lexicographic order.
EigenDecomposition jacobi_eigen_symmetric(const DenseMatrix& s);

// Centers the rows, forms S = (1/n) sum x x^T, decomposes it, and keeps the
// smallest K whose explained-variance ratio exceeds tau (or fixed_k).
PcaModel fit_pca(const DenseMatrix& x, double tau,
                 std::optional<std::size_t> fixed_k = std::nullopt);

// Rows map to V^T (x - mean).
DenseMatrix transform(const PcaModel& model, const DenseMatrix& x);

// Rows map back to V y + mean (exact inverse only when K = d).
DenseMatrix inverse_transform(const PcaModel& model, const DenseMatrix& y);

double explained_variance_ratio(const PcaModel& model);

// TSV persistence at 12 significant digits, with a format-version tag.
void save_pca(const PcaModel& model, std::ostream& out);
PcaModel load_pca(std::istream& in);
void save_pca_file(const PcaModel& model, const std::string& path);
PcaModel load_pca_file(const std::string& path);

}  // namespace instrank::pca
