#include "ntkflow/kernels.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "ntkflow/walsh.hpp"

namespace ntkflow {

using BigReal = boost::multiprecision::cpp_bin_float_100;

struct HighPrecTables {
    std::vector<BigReal> phi_ntk;
    std::vector<BigReal> f_ck;
};

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "erf") return Activation::Erf;
    if (s == "tanh") return Activation::Tanh;
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "linear") return Activation::Linear;
    throw ConfigError("unknown activation '" + s + "'");
}

std::string to_string(Activation a) {
    switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Erf: return "erf";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Linear: return "linear";
    }
    return "?";
}

std::string to_string(KernelKind k) { return k == KernelKind::Ntk ? "ntk" : "ck"; }

void KernelSpec::validate() const {
    if (depth < 1) throw ConfigError("kernel depth must be >= 1");
    if (!(weight_variance > 0)) throw ConfigError("weight_variance must be > 0");
    if (bias_variance < 0) throw ConfigError("bias_variance must be >= 0");
}

// ---------------------------------------------------------------------------
// Gauss-Hermite rules (weight e^{-t^2})
// ---------------------------------------------------------------------------

namespace {

struct GaussHermiteD {
    Eigen::VectorXd nodes, weights;
};

// Golub-Welsch in double precision.
GaussHermiteD gauss_hermite_double(int n) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        const double off = std::sqrt((k + 1) / 2.0);
        j(k, k + 1) = off;
        j(k + 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    GaussHermiteD out;
    out.nodes = es.eigenvalues();
    out.weights.resize(n);
    const double sqrt_pi = std::sqrt(M_PI);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        out.weights[i] = sqrt_pi * v0 * v0;
    }
    return out;
}

const GaussHermiteD& gh64() {
    static const GaussHermiteD rule = gauss_hermite_double(64);
    return rule;
}

struct GaussHermiteBig {
    std::vector<BigReal> nodes, weights;
};

// Double-precision nodes polished by Newton iteration on the physicists'
// H_n; weights from w_i = 2^{n-1} n! sqrt(pi) / (n H_{n-1}(x_i))^2.
GaussHermiteBig gauss_hermite_big(int n) {
    const auto seed = gauss_hermite_double(n);
    GaussHermiteBig out;
    out.nodes.resize(n);
    out.weights.resize(n);
    const BigReal pi = boost::math::constants::pi<BigReal>();

    BigReal two_pow = 1, fact = 1;
    for (int k = 0; k < n - 1; ++k) two_pow *= 2;
    for (int k = 2; k <= n; ++k) fact *= k;
    const BigReal weight_num = two_pow * fact * sqrt(pi);

    for (int i = 0; i < n; ++i) {
        BigReal x = seed.nodes[i];
        BigReal hm1 = 0;
        for (int iter = 0; iter < 60; ++iter) {
            BigReal hkm1 = 1, hk = 2 * x;
            for (int k = 1; k < n; ++k) {
                const BigReal hnext = 2 * x * hk - BigReal(2 * k) * hkm1;
                hkm1 = hk;
                hk = hnext;
            }
            hm1 = hkm1;
            const BigReal step = hk / (BigReal(2 * n) * hkm1);
            x -= step;
            if (abs(step) < BigReal("1e-90") * (1 + abs(x))) break;
        }
        out.nodes[i] = x;
        const BigReal hn1 = BigReal(n) * hm1;
        out.weights[i] = weight_num / (hn1 * hn1);
    }
    return out;
}

const GaussHermiteBig& gh_big() {
    static const GaussHermiteBig rule = gauss_hermite_big(512);
    return rule;
}

// ---------------------------------------------------------------------------
// dual activation maps, templated on scalar
// ---------------------------------------------------------------------------

template <typename T> T clamp_rho(const T& rho) {
    if (rho > 1) return T(1);
    if (rho < -1) return T(-1);
    return rho;
}

template <typename T> T pi_of();
template <> double pi_of<double>() { return M_PI; }
template <> BigReal pi_of<BigReal>() { return boost::math::constants::pi<BigReal>(); }

// arc-cosine kernel of degree 1: E[relu(u) relu(v)]
template <typename T> T relu_phi(const T& q, const T& c) {
    using std::acos;
    using std::sqrt;
    const T rho = clamp_rho(T(c / q));
    const T theta = acos(rho);
    return q * (sqrt(T(1) - rho * rho) + rho * (pi_of<T>() - theta)) / (2 * pi_of<T>());
}

template <typename T> T relu_dphi(const T& q, const T& c) {
    using std::acos;
    const T rho = clamp_rho(T(c / q));
    return (pi_of<T>() - acos(rho)) / (2 * pi_of<T>());
}

template <typename T> T erf_phi(const T& q, const T& c) {
    using std::asin;
    const T denom = 1 + 2 * q;
    return (2 / pi_of<T>()) * asin(clamp_rho(T(2 * c / denom)));
}

template <typename T> T erf_dphi(const T& q, const T& c) {
    using std::sqrt;
    const T denom = (1 + 2 * q) * (1 + 2 * q) - 4 * c * c;
    return (4 / pi_of<T>()) / sqrt(denom);
}

double sigmoid_of(double x) { return 1.0 / (1.0 + std::exp(-x)); }
BigReal sigmoid_of(const BigReal& x) { return 1 / (1 + exp(-x)); }

// Double-precision product quadrature for activations without closed forms.
DualActivation quad_dual(Activation a, double q, double c) {
    const auto& rule = gh64();
    const int n = int(rule.nodes.size());
    const double rho = std::clamp(c / q, -1.0, 1.0);
    const double sd = std::sqrt(q);
    const double s2 = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    double acc_phi = 0.0, acc_dphi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = std::sqrt(2.0) * rule.nodes[i];
        const double u = sd * x;
        double fu, dfu;
        if (a == Activation::Tanh) {
            fu = std::tanh(u);
            dfu = 1.0 - fu * fu;
        } else {
            fu = sigmoid_of(u);
            dfu = fu * (1.0 - fu);
        }
        double inner_phi = 0.0, inner_dphi = 0.0;
        for (int j = 0; j < n; ++j) {
            const double y = std::sqrt(2.0) * rule.nodes[j];
            const double v = sd * (rho * x + s2 * y);
            double fv, dfv;
            if (a == Activation::Tanh) {
                fv = std::tanh(v);
                dfv = 1.0 - fv * fv;
            } else {
                fv = sigmoid_of(v);
                dfv = fv * (1.0 - fv);
            }
            inner_phi += rule.weights[j] * fv;
            inner_dphi += rule.weights[j] * dfv;
        }
        acc_phi += rule.weights[i] * fu * inner_phi;
        acc_dphi += rule.weights[i] * dfu * inner_dphi;
    }
    return {acc_phi / M_PI, acc_dphi / M_PI};
}

// ---------------------------------------------------------------------------
// Hermite-coefficient route for the extended-precision path: expanding
// f(x) = phi(sqrt(q) x) = sum_k c_k he_k(x) in the orthonormal Hermite basis
// gives E[f(u) f(v)] = sum_k c_k^2 rho^k for unit bivariate (u, v) (Mehler).
// ---------------------------------------------------------------------------

enum class MapKind { Phi, DPhi };

struct HermiteCoeffs {
    std::vector<BigReal> c;
};

constexpr int kHermiteKmax = 384;

HermiteCoeffs hermite_coeffs(Activation a, MapKind mk, const BigReal& q) {
    const auto& rule = gh_big();
    const int n = int(rule.nodes.size());
    const BigReal sqrt2 = sqrt(BigReal(2));
    const BigReal sd = sqrt(q);
    const BigReal norm = sqrt(boost::math::constants::pi<BigReal>());
    std::vector<BigReal> fx(n), w(n), xs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = sqrt2 * rule.nodes[i]; // standard-normal abscissa
        const BigReal u = sd * xs[i];
        if (a == Activation::Tanh) {
            const BigReal t = tanh(u);
            fx[i] = (mk == MapKind::Phi) ? t : 1 - t * t;
        } else {
            const BigReal s = sigmoid_of(u);
            fx[i] = (mk == MapKind::Phi) ? s : s * (1 - s);
        }
        w[i] = rule.weights[i] / norm;
    }
    HermiteCoeffs out;
    out.c.resize(kHermiteKmax + 1);
    // normalized recurrence he_{k+1} = (x he_k - sqrt(k) he_{k-1}) / sqrt(k+1)
    std::vector<BigReal> hkm1(n, 0), hk(n, 1);
    for (int k = 0; k <= kHermiteKmax; ++k) {
        BigReal acc = 0;
        for (int i = 0; i < n; ++i) acc += w[i] * fx[i] * hk[i];
        out.c[std::size_t(k)] = acc;
        const BigReal inv = 1 / sqrt(BigReal(k + 1));
        const BigReal sk = sqrt(BigReal(k));
        for (int i = 0; i < n; ++i) {
            const BigReal hnext = (xs[i] * hk[i] - sk * hkm1[i]) * inv;
            hkm1[i] = hk[i];
            hk[i] = hnext;
        }
    }
    return out;
}

const HermiteCoeffs& cached_coeffs(Activation a, MapKind mk, const BigReal& q) {
    static std::map<std::tuple<int, int, double>, HermiteCoeffs> cache;
    static std::mutex mu;
    const auto key = std::make_tuple(int(a), int(mk), q.convert_to<double>());
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, hermite_coeffs(a, mk, q)).first;
    return it->second;
}

BigReal series_dual(Activation a, MapKind mk, const BigReal& q, const BigReal& c) {
    const auto& hc = cached_coeffs(a, mk, q);
    const BigReal rho = clamp_rho(BigReal(c / q));
    BigReal acc = 0, rk = 1;
    for (std::size_t k = 0; k < hc.c.size(); ++k) {
        acc += hc.c[k] * hc.c[k] * rk;
        rk *= rho;
    }
    return acc;
}

template <typename T> T dual_phi(Activation a, const T& q, const T& c);
template <typename T> T dual_dphi(Activation a, const T& q, const T& c);

template <> double dual_phi<double>(Activation a, const double& q, const double& c) {
    switch (a) {
    case Activation::Relu: return relu_phi(q, c);
    case Activation::Erf: return erf_phi(q, c);
    case Activation::Linear: return c;
    default: return quad_dual(a, q, c).e_phi_phi;
    }
}

template <> double dual_dphi<double>(Activation a, const double& q, const double& c) {
    switch (a) {
    case Activation::Relu: return relu_dphi(q, c);
    case Activation::Erf: return erf_dphi(q, c);
    case Activation::Linear: return 1.0;
    default: return quad_dual(a, q, c).e_dphi_dphi;
    }
}

template <> BigReal dual_phi<BigReal>(Activation a, const BigReal& q, const BigReal& c) {
    switch (a) {
    case Activation::Relu: return relu_phi(q, c);
    case Activation::Erf: return erf_phi(q, c);
    case Activation::Linear: return c;
    default: return series_dual(a, MapKind::Phi, q, c);
    }
}

template <> BigReal dual_dphi<BigReal>(Activation a, const BigReal& q, const BigReal& c) {
    switch (a) {
    case Activation::Relu: return relu_dphi(q, c);
    case Activation::Erf: return erf_dphi(q, c);
    case Activation::Linear: return BigReal(1);
    default: return series_dual(a, MapKind::DPhi, q, c);
    }
}

} // namespace

DualActivation dual_activation(Activation a, double q, double c) {
    if (!(q > 0)) throw ConfigError("dual_activation needs q > 0");
    if (std::abs(c) > q * (1 + 1e-12)) throw ConfigError("invalid Gram: |c| > q");
    const double cc = std::clamp(c, -q, q);
    return {dual_phi<double>(a, q, cc), dual_dphi<double>(a, q, cc)};
}

double KernelFn::at_dot(KernelKind k, int dot) const {
    const int d = (n_qubits - dot) / 2;
    if (d < 0 || d > n_qubits || (n_qubits - dot) % 2 != 0)
        throw ConfigError("dot product not representable on " + std::to_string(n_qubits) + " spins");
    return table(k)[std::size_t(d)];
}

namespace {

template <typename T>
void layer_recursion(const KernelSpec& spec, int n, std::vector<T>& f_out,
                     std::vector<T>& phi_out) {
    const T sw2 = T(spec.weight_variance);
    const T sb2 = T(spec.bias_variance);
    const int m = n + 1;
    std::vector<T> sig(m), theta(m);
    for (int d = 0; d < m; ++d) {
        sig[d] = sw2 * T(n - 2 * d) / T(n) + sb2;
        theta[d] = sig[d];
    }
    T q = sw2 + sb2;
    for (int layer = 0; layer < spec.depth; ++layer) {
        for (int d = 0; d < m; ++d) {
            const T a = dual_phi<T>(spec.activation, q, sig[d]);
            const T ad = dual_dphi<T>(spec.activation, q, sig[d]);
            const T signew = sw2 * a + sb2;
            theta[d] = signew + sw2 * ad * theta[d];
            sig[d] = signew;
        }
        q = sig[0]; // all inputs share the same norm, so the diagonal is sig at d=0
    }
    f_out = std::move(sig);
    phi_out = std::move(theta);
}

} // namespace

KernelFn kernel_tables(const KernelSpec& spec, int n_qubits) {
    spec.validate();
    if (n_qubits < 1) throw ConfigError("kernel_tables needs n >= 1");
    auto hp = std::make_shared<HighPrecTables>();
    layer_recursion<BigReal>(spec, n_qubits, hp->f_ck, hp->phi_ntk);
    KernelFn k;
    k.n_qubits = n_qubits;
    k.phi_ntk.resize(std::size_t(n_qubits) + 1);
    k.f_ck.resize(std::size_t(n_qubits) + 1);
    for (int d = 0; d <= n_qubits; ++d) {
        k.phi_ntk[std::size_t(d)] = hp->phi_ntk[std::size_t(d)].convert_to<double>();
        k.f_ck[std::size_t(d)] = hp->f_ck[std::size_t(d)].convert_to<double>();
    }
    if (!(k.phi_ntk[0] > 0) || !(k.f_ck[0] > 0))
        throw NumericalError("kernel diagonal is not positive");
    k.hp = std::move(hp);
    return k;
}

double SectorSpectrum::min_nonzero() const {
    double v = max_eigenvalue();
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        if (eigenvalues[i] > 0) v = std::min(v, eigenvalues[i]);
    return v;
}

Eigen::Index SectorSpectrum::degeneracy(int sector) const {
    double b = 1;
    for (int i = 0; i < sector; ++i) b = b * (n_qubits - i) / (i + 1);
    return Eigen::Index(std::llround(b));
}

Eigen::VectorXd SectorSpectrum::per_index() const {
    const auto sec = sector_of_index(n_qubits);
    Eigen::VectorXd out(Eigen::Index(1) << n_qubits);
    for (Eigen::Index b = 0; b < out.size(); ++b) out[b] = eigenvalues[sec[std::size_t(b)]];
    return out;
}

SectorSpectrum sector_eigenvalues(const KernelFn& k, KernelKind kind) {
    const int n = k.n_qubits;
    std::vector<BigReal> prof(std::size_t(n) + 1);
    if (k.hp) {
        prof = (kind == KernelKind::Ntk) ? k.hp->phi_ntk : k.hp->f_ck;
    } else {
        const auto& t = k.table(kind);
        for (int d = 0; d <= n; ++d) prof[std::size_t(d)] = BigReal(t[std::size_t(d)]);
    }
    SectorSpectrum s;
    s.n_qubits = n;
    s.kind = kind;
    s.eigenvalues.resize(n + 1);
    std::vector<BigReal> lam(std::size_t(n) + 1);
    BigReal lam_max = 0;
    for (int m = 0; m <= n; ++m) {
        // Krawtchouk recurrence (d+1) K_{d+1} = (n-2m) K_d - (n-d+1) K_{d-1}
        BigReal km1 = 0, kd = 1, acc = 0;
        for (int d = 0; d <= n; ++d) {
            acc += prof[std::size_t(d)] * kd;
            const BigReal knext =
                (BigReal(n - 2 * m) * kd - BigReal(n - d + 1) * km1) / BigReal(d + 1);
            km1 = kd;
            kd = knext;
        }
        lam[std::size_t(m)] = acc;
        if (abs(acc) > lam_max) lam_max = abs(acc);
    }
    const BigReal zero_floor = lam_max * BigReal("1e-40");
    for (int m = 0; m <= n; ++m) {
        const BigReal& v = lam[std::size_t(m)];
        s.eigenvalues[m] = (abs(v) < zero_floor) ? 0.0 : v.convert_to<double>();
    }
    return s;
}

Eigen::MatrixXd dense_kernel(const KernelFn& k, KernelKind kind) {
    const int n = k.n_qubits;
    if (n > 14) throw NumericalError("dense kernel requested for n > 14");
    const Eigen::Index d = Eigen::Index(1) << n;
    const auto& t = k.table(kind);
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double v = t[std::size_t(std::popcount(std::uint64_t(a ^ b)))];
            m(a, b) = v;
            m(b, a) = v;
        }
    return m;
}

HadamardDiagnostic hadamard_sector_check(const Eigen::MatrixXd& dense, int n_qubits) {
    const Eigen::Index d = Eigen::Index(1) << n_qubits;
    if (dense.rows() != d) throw ConfigError("hadamard_sector_check: dimension mismatch");
    Eigen::MatrixXd w = dense;
    for (Eigen::Index c = 0; c < d; ++c) {
        Eigen::VectorXd col = w.col(c);
        fwht_inplace(col);
        w.col(c) = col;
    }
    for (Eigen::Index r = 0; r < d; ++r) {
        Eigen::VectorXd row = w.row(r);
        fwht_inplace(row);
        w.row(r) = row / double(d);
    }
    HadamardDiagnostic out;
    const auto sec = sector_of_index(n_qubits);
    out.sector_means = Eigen::VectorXd::Zero(n_qubits + 1);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_qubits + 1);
    double offmax = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j)
            if (i != j) offmax = std::max(offmax, std::abs(w(i, j)));
        out.sector_means[sec[std::size_t(i)]] += w(i, i);
        counts[sec[std::size_t(i)]] += 1;
    }
    out.sector_means.array() /= counts.array();
    double spread = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        spread = std::max(spread, std::abs(w(i, i) - out.sector_means[sec[std::size_t(i)]]));
    out.max_offdiagonal = offmax;
    out.max_within_sector_spread = spread;
    return out;
}

WeakBiasReport weak_bias_check(const SectorSpectrum& s, double tol) {
    WeakBiasReport r;
    const auto& lam = s.eigenvalues;
    const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    double viol = 0;
    for (int start : {0, 1})
        for (int m = start; m + 2 <= s.n_qubits; m += 2)
            viol = std::max(viol, (lam[m + 2] - lam[m]) / scale);
    r.max_violation = std::max(viol, 0.0);
    r.ordering_ok = r.max_violation <= tol;
    r.maximal_sector = (lam.size() > 1 && lam[1] > lam[0]) ? 1 : 0;
    std::vector<double> sorted(lam.data(), lam.data() + lam.size());
    std::sort(sorted.rbegin(), sorted.rend());
    double second = 0.0;
    for (double v : sorted)
        if (v < sorted.front() * (1 - 1e-9)) { second = v; break; }
    r.bias_ratio = second > 0 ? sorted.front() / second
                              : std::numeric_limits<double>::infinity();
    return r;
}

} // namespace ntkflow
