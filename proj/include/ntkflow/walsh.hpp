#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <vector>

namespace ntkflow {

// In-place fast Walsh-Hadamard transform, unnormalized:
//   out_s = sum_sigma (-1)^{popcount(s & sigma)} v_sigma.
// Self-inverse up to a factor of 2^n. Index bit i of sigma encodes spin i,
// bit set <=> spin down (sigma_i = -1), so index s labels the X-product
// state |s> and popcount(s) is its sector |s|.
template <typename Scalar>
void fwht_inplace(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
    const Eigen::Index n = v.size();
    for (Eigen::Index h = 1; h < n; h <<= 1) {
        for (Eigen::Index i = 0; i < n; i += (h << 1)) {
            for (Eigen::Index j = i; j < i + h; ++j) {
                const Scalar a = v[j];
                const Scalar b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> fwht(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v) {
    fwht_inplace(v);
    return v;
}

/// Sector index (popcount) for every basis index of an n-qubit register.
inline std::vector<int> sector_of_index(int n_qubits) {
    std::vector<int> sec(std::size_t(1) << n_qubits);
    for (std::size_t b = 0; b < sec.size(); ++b)
        sec[b] = std::popcount(b);
    return sec;
}

} // namespace ntkflow
