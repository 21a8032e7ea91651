#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "ntkflow/errors.hpp"

namespace ntkflow {

enum class Activation { Relu, Erf, Tanh, Sigmoid, Linear };
enum class KernelKind { Ntk, Ck };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);
std::string to_string(KernelKind k);

/// Architecture of the infinite-width feedforward network: `depth` hidden
/// layers with activation `activation`, fan-in scaled weights of variance
/// `weight_variance` and bias variance `bias_variance` (zero-bias default).
struct KernelSpec {
    int depth = 1;
    Activation activation = Activation::Relu;
    double weight_variance = 1.0;
    double bias_variance = 0.0;

    void validate() const;
};

struct DualActivation {
    double e_phi_phi;   // E[phi(u) phi(v)]
    double e_dphi_dphi; // E[phi'(u) phi'(v)]
};

/// Gaussian expectation maps for (u,v) jointly normal with equal variances q
/// and covariance c. Closed forms for relu/erf/linear, 64-point Gauss-Hermite
/// product quadrature for tanh/sigmoid.
DualActivation dual_activation(Activation a, double q, double c);

struct HighPrecTables; // extended-precision profile values, internal

/// The profile functions Phi (NTK) and F (CK) sampled at the n+1 possible
/// dot products t = n, n-2, ..., -n, stored by Hamming distance d = (n-t)/2.
struct KernelFn {
    int n_qubits = 0;
    std::vector<double> phi_ntk;
    std::vector<double> f_ck;
    std::shared_ptr<const HighPrecTables> hp;

    const std::vector<double>& table(KernelKind k) const {
        return k == KernelKind::Ntk ? phi_ntk : f_ck;
    }
    double at_dot(KernelKind k, int dot) const;
    int dot_of_distance(int d) const { return n_qubits - 2 * d; }
};

/// Runs the depth-L layer recursion from the input Gram sigma.sigma'/N + sb2.
/// Table values are the infinite-width limits of J J^T (NTK) and of the
/// output covariance (CK); evaluated in extended precision internally.
KernelFn kernel_tables(const KernelSpec& spec, int n_qubits);

/// The n+1 degenerate eigenvalues, indexed by the sector |s| (number of
/// minus signs of the X-product eigenstate).
struct SectorSpectrum {
    int n_qubits = 0;
    KernelKind kind = KernelKind::Ntk;
    Eigen::VectorXd eigenvalues; // by |s|, size n+1

    double max_eigenvalue() const { return eigenvalues.maxCoeff(); }
    double min_eigenvalue() const { return eigenvalues.minCoeff(); }
    /// Smallest eigenvalue strictly above the exact-zero floor.
    double min_nonzero() const;
    Eigen::Index degeneracy(int sector) const;
    /// Eigenvalue per basis index (popcount lookup), length 2^n.
    Eigen::VectorXd per_index() const;
};

/// lam_m = sum_d Phi(n-2d) K_d(m; n), with K_d the binary Krawtchouk
/// polynomial. Accumulated in extended precision; magnitudes below
/// 1e-40 * lam_max are exact zeros of the profile and are clamped to 0.
SectorSpectrum sector_eigenvalues(const KernelFn& k, KernelKind kind);

/// Entry (sigma, sigma') = profile(sigma . sigma'). Guarded at n <= 14.
Eigen::MatrixXd dense_kernel(const KernelFn& k, KernelKind kind);

/// Diagonal of W K W / 2^n averaged per sector (the dense route to the
/// sector eigenvalues), plus the largest off-diagonal residual found.
struct HadamardDiagnostic {
    Eigen::VectorXd sector_means;
    double max_offdiagonal = 0.0;
    double max_within_sector_spread = 0.0;
};
HadamardDiagnostic hadamard_sector_check(const Eigen::MatrixXd& dense_kernel, int n_qubits);

struct WeakBiasReport {
    bool ordering_ok = true;
    double max_violation = 0.0; // relative to the top eigenvalue
    int maximal_sector = 0;     // 0 or 1
    double bias_ratio = 0.0;    // lam_max / second largest unique
};

/// Verifies the even/odd interlaced orderings lam_0 >= lam_2 >= ... and
/// lam_1 >= lam_3 >= ...; violations beyond 1e-12 (relative) indicate a
/// kernel construction bug.
WeakBiasReport weak_bias_check(const SectorSpectrum& s, double tol = 1e-12);

} // namespace ntkflow
