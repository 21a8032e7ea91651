#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ntkflow/errors.hpp"

namespace ntkflow {

enum class Pauli { X, Y, Z };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

/// One weighted Pauli string. Sites absent from `ops` carry the identity.
struct PauliTerm {
    double coeff = 0.0;
    std::map<int, Pauli> ops;

    int y_count() const;
    int xy_count_on(const std::vector<int>& sites) const;
    std::string to_string(int n_qubits) const;
};

struct Spectrum {
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors; // orthonormal columns, phase-fixed
};

/// Deterministic eigenvector sign convention. The flow and overlap
/// diagnostics depend on it through the eigenbasis-sum initial state, so it
/// is part of the reproducibility contract.
enum class PhaseConvention {
    MaxAbsPositive,      // largest-magnitude amplitude made positive (default)
    FirstNonzeroPositive // first amplitude above 1e-12 made positive
};

void apply_phase_convention(Eigen::MatrixXd& columns, PhaseConvention convention);

constexpr double kDegeneracyTol = 1e-10;
constexpr int kMaxDenseQubits = 14;

/// Real spin Hamiltonian as a sum of Pauli strings. Terms with an odd number
/// of Y factors are rejected (they would make the matrix complex). Instances
/// are immutable after construction; the dense matrix and the spectrum are
/// cached on first use, so warm the caches before sharing across threads.
class Hamiltonian {
public:
    Hamiltonian(int n_qubits, std::vector<PauliTerm> terms,
                PhaseConvention phase = PhaseConvention::MaxAbsPositive);

    int n_qubits() const { return n_; }
    Eigen::Index dim() const { return Eigen::Index(1) << n_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    PhaseConvention phase_convention() const { return phase_; }

    const Eigen::MatrixXd& dense() const;
    const Spectrum& spectrum() const;
    bool spectrum_ready() const { return spec_ != nullptr; }

    double trace() const;          // 2^n times the identity coefficient
    double frobenius_norm() const; // exact from Pauli orthogonality

    double ground_energy() const;
    /// Strict gap E1 - E0; throws DegenerateGroundStateError below kDegeneracyTol.
    double gap() const;
    /// Gap to the first eigenvalue strictly above E0 + tol (degeneracy-aware).
    double distinct_gap(double tol = kDegeneracyTol) const;
    int ground_degeneracy(double tol = kDegeneracyTol) const;
    /// Unique ground state; throws DegenerateGroundStateError when degenerate.
    Eigen::VectorXd ground_state() const;
    /// Orthonormal basis of the lowest eigenspace (always defined).
    Eigen::MatrixXd ground_space(double tol = kDegeneracyTol) const;

    bool is_stoquastic(double tol = 1e-12) const;

    /// Conjugation by prod_{i in sites} axis_i, performed symbolically as
    /// exact sign flips (Z flips terms with odd X/Y support on sites, X flips
    /// odd Z/Y support).
    Hamiltonian pauli_frame(Pauli axis, const std::vector<int>& sites) const;

    /// Single-site basis change by per-site orthogonal matrices acting on the
    /// (X, Y, Z) coefficient vectors; requires an at most 2-local Hamiltonian.
    Hamiltonian local_rotation(const std::vector<Eigen::Matrix3d>& per_site) const;
    Hamiltonian local_rotation(const Eigen::Matrix3d& uniform) const;

private:
    int n_;
    std::vector<PauliTerm> terms_;
    PhaseConvention phase_;
    mutable std::shared_ptr<const Eigen::MatrixXd> dense_;
    mutable std::shared_ptr<const Spectrum> spec_;
};

/// Spec'd oracle entry point: builds both caches and returns them. With
/// `require_unique_ground` (the default, matching the paper's standing
/// assumption) a degenerate lowest level is a hard error.
std::pair<const Eigen::MatrixXd*, const Spectrum*>
dense_and_spectrum(const Hamiltonian& h, bool require_unique_ground = true);

enum class ModelKind { Tfim, LocalField, HeisenbergTf, Xyz, J1J2, Custom };

ModelKind model_kind_from_string(const std::string& s);

struct ModelSpec {
    ModelKind kind = ModelKind::Tfim;
    int n = 1;
    std::map<std::string, double> params;
    std::vector<std::pair<int, int>> edges; // empty -> open chain default
    std::vector<PauliTerm> custom_terms;    // used by ModelKind::Custom
    PhaseConvention phase = PhaseConvention::MaxAbsPositive;
};

std::vector<std::pair<int, int>> chain_edges(int n, bool periodic = false);
std::vector<std::pair<int, int>> next_nearest_edges(int n, bool periodic = false);

/// Model constructors:
///   tfim:          -h sum X_i - sum_<ij> Z_i Z_j
///   local_field:   -h sum X_i
///   heisenberg_tf: sum_<ij> (XX + YY + ZZ) - h sum X_i
///   xyz:           sum_<ij> (alpha XX + beta ZZ + gamma YY)
///   j1j2:          J1 sum_<ij> vec(s).vec(s) + J2 sum_<<ij>> vec(s).vec(s)
Hamiltonian build_model(const ModelSpec& spec);

/// Uniform SO(2) rotation in the XZ plane: X -> cos(t) X + sin(t) Z,
/// Z -> -sin(t) X + cos(t) Z. Applied to -sum X_i it yields
/// sum_i (-cos(t) X_i - sin(t) Z_i).
Eigen::Matrix3d xz_rotation(double theta);

/// The 2x2 real unitary u with u P u^T realizing xz_rotation(theta) on the
/// Pauli axes; kron powers of it transport states between the bases.
Eigen::Matrix2d xz_site_unitary(double theta);

/// Dense conjugation of an operator by the product of per-site 2x2 unitaries.
Eigen::MatrixXd conjugate_by_local(const Eigen::MatrixXd& dense, const Eigen::Matrix2d& u, int n_qubits);

} // namespace ntkflow
