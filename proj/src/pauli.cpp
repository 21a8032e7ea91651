#include "ntkflow/pauli.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace ntkflow {

char pauli_char(Pauli p) {
    switch (p) {
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
    }
    return '?';
}

Pauli pauli_from_char(char c) {
    switch (c) {
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    }
    throw ConfigError(std::string("unknown Pauli letter '") + c + "'");
}

int PauliTerm::y_count() const {
    int k = 0;
    for (const auto& [site, p] : ops)
        if (p == Pauli::Y) ++k;
    return k;
}

int PauliTerm::xy_count_on(const std::vector<int>& sites) const {
    int k = 0;
    for (int s : sites) {
        auto it = ops.find(s);
        if (it != ops.end() && (it->second == Pauli::X || it->second == Pauli::Y)) ++k;
    }
    return k;
}

std::string PauliTerm::to_string(int n_qubits) const {
    std::ostringstream os;
    os << coeff << " * ";
    if (ops.empty()) os << "I";
    for (const auto& [site, p] : ops) {
        if (site != ops.begin()->first) os << " ";
        os << pauli_char(p) << site;
    }
    (void)n_qubits;
    return os.str();
}

namespace {

std::vector<PauliTerm> canonicalize(int n, std::vector<PauliTerm> terms) {
    std::map<std::map<int, Pauli>, double> merged;
    for (auto& t : terms) {
        if (!std::isfinite(t.coeff))
            throw ConfigError("Pauli term coefficient must be finite");
        for (const auto& [site, p] : t.ops) {
            (void)p;
            if (site < 0 || site >= n)
                throw ConfigError("Pauli term references site " + std::to_string(site) +
                                  " outside 0.." + std::to_string(n - 1));
        }
        if (t.y_count() % 2 != 0)
            throw ConfigError("term with an odd number of Y factors would make the Hamiltonian complex");
        merged[t.ops] += t.coeff;
    }
    std::vector<PauliTerm> out;
    out.reserve(merged.size());
    for (auto& [ops, c] : merged) {
        if (std::abs(c) < 1e-15) continue;
        out.push_back(PauliTerm{c, ops});
    }
    return out;
}

} // namespace

Hamiltonian::Hamiltonian(int n_qubits, std::vector<PauliTerm> terms, PhaseConvention phase)
    : n_(n_qubits), terms_(canonicalize(n_qubits, std::move(terms))), phase_(phase) {
    if (n_ < 1) throw ConfigError("n_qubits must be >= 1");
}

const Eigen::MatrixXd& Hamiltonian::dense() const {
    if (dense_) return *dense_;
    if (n_ > kMaxDenseQubits)
        throw NumericalError("dense matrix requested for n = " + std::to_string(n_) +
                             " > " + std::to_string(kMaxDenseQubits));
    const Eigen::Index d = dim();
    auto m = std::make_shared<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(d, d));
    for (const auto& t : terms_) {
        for (Eigen::Index b = 0; b < d; ++b) {
            Eigen::Index b2 = b;
            int ipow = 0; // accumulated power of i from Y factors
            int sign = 1;
            for (const auto& [site, p] : t.ops) {
                const bool bit = (b2 >> site) & 1; // bit set <=> spin down
                switch (p) {
                case Pauli::Z:
                    if (bit) sign = -sign;
                    break;
                case Pauli::X:
                    b2 ^= Eigen::Index(1) << site;
                    break;
                case Pauli::Y:
                    // Y|0> = i|1>, Y|1> = -i|0>
                    ipow += 1;
                    if (bit) sign = -sign;
                    b2 ^= Eigen::Index(1) << site;
                    break;
                }
            }
            // even Y count guaranteed, so i^ipow is +-1
            if ((ipow / 2) % 2 != 0) sign = -sign;
            (*m)(b2, b) += t.coeff * sign;
        }
    }
    const double asym = (*m - m->transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, m->cwiseAbs().maxCoeff());
    if (asym > 1e-12 * scale)
        throw NumericalError("dense Hamiltonian is not symmetric");
    dense_ = m;
    return *dense_;
}

void apply_phase_convention(Eigen::MatrixXd& columns, PhaseConvention convention) {
    for (Eigen::Index k = 0; k < columns.cols(); ++k) {
        Eigen::Index idx = 0;
        if (convention == PhaseConvention::MaxAbsPositive) {
            columns.col(k).cwiseAbs().maxCoeff(&idx);
        } else {
            idx = 0;
            while (idx + 1 < columns.rows() && std::abs(columns(idx, k)) <= 1e-12) ++idx;
        }
        if (columns(idx, k) < 0) columns.col(k) = -columns.col(k);
    }
}

const Spectrum& Hamiltonian::spectrum() const {
    if (spec_) return *spec_;
    const Eigen::MatrixXd& m = dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigensolver failed");
    auto s = std::make_shared<Spectrum>();
    s->eigenvalues = es.eigenvalues();
    s->eigenvectors = es.eigenvectors();
    apply_phase_convention(s->eigenvectors, phase_);
    spec_ = s;
    return *spec_;
}

double Hamiltonian::trace() const {
    for (const auto& t : terms_)
        if (t.ops.empty()) return t.coeff * double(dim());
    return 0.0;
}

double Hamiltonian::frobenius_norm() const {
    double s2 = 0.0;
    for (const auto& t : terms_) s2 += t.coeff * t.coeff;
    return std::sqrt(s2 * double(dim()));
}

double Hamiltonian::ground_energy() const { return spectrum().eigenvalues[0]; }

double Hamiltonian::gap() const {
    const auto& ev = spectrum().eigenvalues;
    const double g = ev[1] - ev[0];
    if (g < kDegeneracyTol)
        throw DegenerateGroundStateError(
            "ground state is degenerate (gap " + std::to_string(g) + ")");
    return g;
}

double Hamiltonian::distinct_gap(double tol) const {
    const auto& ev = spectrum().eigenvalues;
    for (Eigen::Index i = 1; i < ev.size(); ++i)
        if (ev[i] > ev[0] + tol) return ev[i] - ev[0];
    throw NumericalError("spectrum is fully degenerate");
}

int Hamiltonian::ground_degeneracy(double tol) const {
    const auto& ev = spectrum().eigenvalues;
    int k = 0;
    while (k < ev.size() && ev[k] <= ev[0] + tol) ++k;
    return k;
}

Eigen::VectorXd Hamiltonian::ground_state() const {
    if (ground_degeneracy() > 1)
        throw DegenerateGroundStateError("ground state is degenerate; use ground_space()");
    return spectrum().eigenvectors.col(0);
}

Eigen::MatrixXd Hamiltonian::ground_space(double tol) const {
    const int k = ground_degeneracy(tol);
    return spectrum().eigenvectors.leftCols(k);
}

bool Hamiltonian::is_stoquastic(double tol) const {
    const Eigen::MatrixXd& m = dense();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (i != j && m(i, j) > tol) return false;
    return true;
}

Hamiltonian Hamiltonian::pauli_frame(Pauli axis, const std::vector<int>& sites) const {
    if (axis == Pauli::Y)
        throw ConfigError("frame axis must be X or Z");
    std::set<int> s(sites.begin(), sites.end());
    for (int i : s)
        if (i < 0 || i >= n_) throw ConfigError("frame site out of range");
    std::vector<PauliTerm> out = terms_;
    for (auto& t : out) {
        int flips = 0;
        for (const auto& [site, p] : t.ops) {
            if (!s.count(site)) continue;
            const bool anti = (axis == Pauli::Z) ? (p == Pauli::X || p == Pauli::Y)
                                                 : (p == Pauli::Z || p == Pauli::Y);
            if (anti) ++flips;
        }
        if (flips % 2 != 0) t.coeff = -t.coeff;
    }
    return Hamiltonian(n_, std::move(out), phase_);
}

namespace {

int axis_index(Pauli p) { return p == Pauli::X ? 0 : (p == Pauli::Y ? 1 : 2); }
Pauli axis_from_index(int i) { return i == 0 ? Pauli::X : (i == 1 ? Pauli::Y : Pauli::Z); }

} // namespace

Hamiltonian Hamiltonian::local_rotation(const std::vector<Eigen::Matrix3d>& per_site) const {
    if (int(per_site.size()) != n_)
        throw ConfigError("need one 3x3 matrix per site");
    for (const auto& o : per_site) {
        if ((o * o.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10)
            throw ConfigError("rotation matrix is not orthogonal");
    }
    std::vector<PauliTerm> out;
    for (const auto& t : terms_) {
        if (t.ops.size() > 2)
            throw ConfigError("coefficient-path rotation requires an at most 2-local Hamiltonian");
        if (t.ops.empty()) {
            out.push_back(t);
        } else if (t.ops.size() == 1) {
            const auto [site, p] = *t.ops.begin();
            const Eigen::Vector3d h = t.coeff * Eigen::Vector3d::Unit(axis_index(p));
            const Eigen::Vector3d ht = per_site[site] * h;
            for (int a = 0; a < 3; ++a)
                if (std::abs(ht[a]) > 1e-15)
                    out.push_back(PauliTerm{ht[a], {{site, axis_from_index(a)}}});
        } else {
            auto it = t.ops.begin();
            const auto [si, pi] = *it++;
            const auto [sj, pj] = *it;
            Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
            J(axis_index(pi), axis_index(pj)) = t.coeff;
            const Eigen::Matrix3d Jt = per_site[si] * J * per_site[sj].transpose();
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    if (std::abs(Jt(a, b)) > 1e-15)
                        out.push_back(PauliTerm{
                            Jt(a, b), {{si, axis_from_index(a)}, {sj, axis_from_index(b)}}});
        }
    }
    try {
        return Hamiltonian(n_, std::move(out), phase_);
    } catch (const ConfigError&) {
        throw ConfigError("rotation produced a complex (odd-Y) Hamiltonian; "
                          "restrict to the XZ plane or use even-Y rotations");
    }
}

Hamiltonian Hamiltonian::local_rotation(const Eigen::Matrix3d& uniform) const {
    return local_rotation(std::vector<Eigen::Matrix3d>(std::size_t(n_), uniform));
}

std::pair<const Eigen::MatrixXd*, const Spectrum*>
dense_and_spectrum(const Hamiltonian& h, bool require_unique_ground) {
    const auto& m = h.dense();
    const auto& s = h.spectrum();
    if (require_unique_ground && h.ground_degeneracy() > 1)
        throw DegenerateGroundStateError("Hamiltonian has a degenerate ground state");
    // orthonormality guard on the cached decomposition
    const Eigen::Index d = s.eigenvectors.cols();
    const double ortho =
        (s.eigenvectors.transpose() * s.eigenvectors - Eigen::MatrixXd::Identity(d, d))
            .cwiseAbs().maxCoeff();
    if (ortho > 1e-10)
        throw NumericalError("eigenvectors lost orthonormality");
    return {&m, &s};
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "tfim") return ModelKind::Tfim;
    if (s == "local_field") return ModelKind::LocalField;
    if (s == "heisenberg_tf") return ModelKind::HeisenbergTf;
    if (s == "xyz") return ModelKind::Xyz;
    if (s == "j1j2") return ModelKind::J1J2;
    if (s == "custom") return ModelKind::Custom;
    throw ConfigError("unknown model kind '" + s + "'");
}

std::vector<std::pair<int, int>> chain_edges(int n, bool periodic) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    if (periodic && n > 2) e.emplace_back(n - 1, 0);
    return e;
}

std::vector<std::pair<int, int>> next_nearest_edges(int n, bool periodic) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 2 < n; ++i) e.emplace_back(i, i + 2);
    if (periodic && n > 3) {
        e.emplace_back(n - 2, 0);
        e.emplace_back(n - 1, 1);
    }
    return e;
}

namespace {

double param_or(const ModelSpec& s, const std::string& key, double fallback) {
    auto it = s.params.find(key);
    return it == s.params.end() ? fallback : it->second;
}

void check_edges(const ModelSpec& s, const std::vector<std::pair<int, int>>& edges) {
    for (auto [i, j] : edges) {
        if (i < 0 || i >= s.n || j < 0 || j >= s.n)
            throw ConfigError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                              ") references an invalid site");
        if (i == j) throw ConfigError("self-edges are not allowed");
    }
}

void add_heisenberg(std::vector<PauliTerm>& terms, double J,
                    const std::vector<std::pair<int, int>>& edges) {
    for (auto [i, j] : edges)
        for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z})
            terms.push_back(PauliTerm{J, {{i, p}, {j, p}}});
}

} // namespace

Hamiltonian build_model(const ModelSpec& spec) {
    if (spec.n < 1) throw ConfigError("model needs n >= 1");
    std::vector<std::pair<int, int>> edges =
        spec.edges.empty() ? chain_edges(spec.n) : spec.edges;
    check_edges(spec, edges);
    std::vector<PauliTerm> terms;

    switch (spec.kind) {
    case ModelKind::Tfim: {
        const double h = param_or(spec, "h", 1.0);
        for (int i = 0; i < spec.n; ++i)
            terms.push_back(PauliTerm{-h, {{i, Pauli::X}}});
        for (auto [i, j] : edges)
            terms.push_back(PauliTerm{-1.0, {{i, Pauli::Z}, {j, Pauli::Z}}});
        break;
    }
    case ModelKind::LocalField: {
        const double h = param_or(spec, "h", 1.0);
        for (int i = 0; i < spec.n; ++i)
            terms.push_back(PauliTerm{-h, {{i, Pauli::X}}});
        break;
    }
    case ModelKind::HeisenbergTf: {
        const double h = param_or(spec, "h", 1.0);
        add_heisenberg(terms, 1.0, edges);
        for (int i = 0; i < spec.n; ++i)
            terms.push_back(PauliTerm{-h, {{i, Pauli::X}}});
        break;
    }
    case ModelKind::Xyz: {
        const double a = param_or(spec, "alpha", -2.0);
        const double b = param_or(spec, "beta", -1.0);
        const double g = param_or(spec, "gamma", -0.5);
        for (auto [i, j] : edges) {
            terms.push_back(PauliTerm{a, {{i, Pauli::X}, {j, Pauli::X}}});
            terms.push_back(PauliTerm{b, {{i, Pauli::Z}, {j, Pauli::Z}}});
            terms.push_back(PauliTerm{g, {{i, Pauli::Y}, {j, Pauli::Y}}});
        }
        break;
    }
    case ModelKind::J1J2: {
        const double j1 = param_or(spec, "j1", 1.0);
        const double j2 = param_or(spec, "j2", 0.5);
        const bool periodic = param_or(spec, "periodic", 0.0) != 0.0;
        const auto nn = spec.edges.empty() ? chain_edges(spec.n, periodic) : spec.edges;
        check_edges(spec, nn);
        add_heisenberg(terms, j1, nn);
        add_heisenberg(terms, j2, next_nearest_edges(spec.n, periodic));
        break;
    }
    case ModelKind::Custom: {
        terms = spec.custom_terms;
        if (terms.empty()) throw ConfigError("custom model needs at least one term");
        break;
    }
    }
    return Hamiltonian(spec.n, std::move(terms), spec.phase);
}

Eigen::Matrix3d xz_rotation(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix3d o;
    // axes ordered (X, Y, Z); maps X -> c X + s Z, Z -> -s X + c Z
    o << c, 0, -s,
         0, 1, 0,
         s, 0, c;
    return o;
}

Eigen::Matrix2d xz_site_unitary(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Eigen::Matrix2d u;
    u << c, s,
        -s, c;
    return u;
}

Eigen::MatrixXd conjugate_by_local(const Eigen::MatrixXd& dense, const Eigen::Matrix2d& u, int n_qubits) {
    const Eigen::Index d = Eigen::Index(1) << n_qubits;
    if (dense.rows() != d) throw ConfigError("dimension mismatch in conjugate_by_local");
    Eigen::MatrixXd U = Eigen::MatrixXd::Ones(1, 1);
    for (int i = 0; i < n_qubits; ++i) {
        Eigen::MatrixXd next(U.rows() * 2, U.cols() * 2);
        next.topLeftCorner(U.rows(), U.cols()) = u(0, 0) * U;
        next.topRightCorner(U.rows(), U.cols()) = u(0, 1) * U;
        next.bottomLeftCorner(U.rows(), U.cols()) = u(1, 0) * U;
        next.bottomRightCorner(U.rows(), U.cols()) = u(1, 1) * U;
        U = std::move(next);
    }
    return U * dense * U.transpose();
}

} // namespace ntkflow
