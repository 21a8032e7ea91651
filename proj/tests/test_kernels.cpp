#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "ntkflow/kernels.hpp"
#include "ntkflow/rng.hpp"
#include "ntkflow/walsh.hpp"

using namespace ntkflow;

TEST_CASE("relu dual activation closed form at rho=1") {
    auto d = dual_activation(Activation::Relu, 1.0, 1.0);
    CHECK(d.e_phi_phi == doctest::Approx(0.5));
    CHECK(d.e_dphi_dphi == doctest::Approx(0.5));
}

TEST_CASE("linear dual activation is the identity map") {
    auto d = dual_activation(Activation::Linear, 2.0, 0.7);
    CHECK(d.e_phi_phi == doctest::Approx(0.7));
    CHECK(d.e_dphi_dphi == doctest::Approx(1.0));
}

TEST_CASE("invalid Gram rejected") {
    CHECK_THROWS_AS(dual_activation(Activation::Relu, 1.0, 1.5), ConfigError);
    CHECK_THROWS_AS(dual_activation(Activation::Tanh, 0.0, 0.0), ConfigError);
}

TEST_CASE("tanh and sigmoid quadrature match Monte-Carlo oracle") {
    const double q = 1.0, c = 0.5;
    auto rng = make_stream(7);
    std::normal_distribution<double> normal;
    const int n = 2'000'000;
    for (Activation a : {Activation::Tanh, Activation::Sigmoid}) {
        double sum = 0, sum2 = 0, dsum = 0, dsum2 = 0;
        const double rho = c / q, s2 = std::sqrt(1 - rho * rho);
        for (int i = 0; i < n; ++i) {
            const double x = normal(rng), y = normal(rng);
            const double u = std::sqrt(q) * x, v = std::sqrt(q) * (rho * x + s2 * y);
            double fu, fv, du, dv;
            if (a == Activation::Tanh) {
                fu = std::tanh(u); fv = std::tanh(v);
                du = 1 - fu * fu; dv = 1 - fv * fv;
            } else {
                fu = 1 / (1 + std::exp(-u)); fv = 1 / (1 + std::exp(-v));
                du = fu * (1 - fu); dv = fv * (1 - fv);
            }
            sum += fu * fv; sum2 += fu * fv * fu * fv;
            dsum += du * dv; dsum2 += du * dv * du * dv;
        }
        const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
        const double dmean = dsum / n, dse = std::sqrt((dsum2 / n - dmean * dmean) / n);
        auto d = dual_activation(a, q, c);
        CHECK(std::abs(d.e_phi_phi - mean) < 4 * se + 1e-12);
        CHECK(std::abs(d.e_dphi_dphi - dmean) < 4 * dse + 1e-12);
    }
}

TEST_CASE("linear network tables are exact") {
    KernelSpec spec;
    spec.activation = Activation::Linear;
    spec.depth = 1;
    const int n = 6;
    auto k = kernel_tables(spec, n);
    for (int d = 0; d <= n; ++d) {
        const double t = n - 2 * d;
        CHECK(k.f_ck[d] == doctest::Approx(t / n).epsilon(1e-12));
        CHECK(k.phi_ntk[d] == doctest::Approx(2 * t / n).epsilon(1e-12));
    }
}

TEST_CASE("diagonal entries reproduce the scalar variance recursion") {
    for (Activation a : {Activation::Relu, Activation::Erf, Activation::Tanh,
                         Activation::Sigmoid}) {
        KernelSpec spec;
        spec.activation = a;
        spec.depth = 2;
        auto k = kernel_tables(spec, 5);
        // scalar recursion in double precision
        double q = 1.0, th = 1.0;
        for (int l = 0; l < 2; ++l) {
            auto d = dual_activation(a, q, q);
            th = d.e_phi_phi + d.e_dphi_dphi * th;
            q = d.e_phi_phi;
        }
        CHECK(k.f_ck[0] == doctest::Approx(q).epsilon(1e-9));
        CHECK(k.phi_ntk[0] == doctest::Approx(th).epsilon(1e-9));
        CHECK(k.phi_ntk[0] > 0);
        CHECK(k.f_ck[0] > 0);
    }
}

TEST_CASE("n=1 sector eigenvalues from a hand-built table") {
    KernelFn k;
    k.n_qubits = 1;
    k.phi_ntk = {3.0, 1.0}; // Phi(1)=3, Phi(-1)=1
    k.f_ck = {2.0, 0.5};
    auto s = sector_eigenvalues(k, KernelKind::Ntk);
    CHECK(s.eigenvalues[0] == doctest::Approx(4.0));
    CHECK(s.eigenvalues[1] == doctest::Approx(2.0));
    auto sc = sector_eigenvalues(k, KernelKind::Ck);
    CHECK(sc.eigenvalues[0] == doctest::Approx(2.5));
    CHECK(sc.eigenvalues[1] == doctest::Approx(1.5));
    auto dm = dense_kernel(k, KernelKind::Ntk);
    CHECK(dm(0, 0) == doctest::Approx(3.0));
    CHECK(dm(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("Krawtchouk path agrees with dense Hadamard conjugation") {
    for (Activation a : {Activation::Relu, Activation::Erf, Activation::Tanh}) {
        for (int depth : {1, 2}) {
            KernelSpec spec;
            spec.activation = a;
            spec.depth = depth;
            const int n = 6;
            auto k = kernel_tables(spec, n);
            for (KernelKind kind : {KernelKind::Ntk, KernelKind::Ck}) {
                auto s = sector_eigenvalues(k, kind);
                auto diag = hadamard_sector_check(dense_kernel(k, kind), n);
                const double scale = s.max_eigenvalue();
                CHECK(diag.max_offdiagonal < 1e-8 * scale);
                CHECK(diag.max_within_sector_spread < 1e-8 * scale);
                for (int m = 0; m <= n; ++m)
                    CHECK(std::abs(s.eigenvalues[m] - diag.sector_means[m]) < 1e-8 * scale);
            }
        }
    }
}

TEST_CASE("dense kernel eigen-decomposition has X-product eigenvectors") {
    KernelSpec spec;
    spec.activation = Activation::Erf;
    spec.depth = 2;
    const int n = 5;
    auto k = kernel_tables(spec, n);
    auto dm = dense_kernel(k, KernelKind::Ck);
    auto s = sector_eigenvalues(k, KernelKind::Ck);
    // column s of the Hadamard matrix (normalized) must be an eigenvector
    const Eigen::Index d = 1 << n;
    auto sec = sector_of_index(n);
    for (Eigen::Index col : {Eigen::Index(0), Eigen::Index(3), Eigen::Index(17), Eigen::Index(31)}) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v[col] = 1.0;
        fwht_inplace(v);
        v /= std::sqrt(double(d));
        const double lam = s.eigenvalues[sec[std::size_t(col)]];
        CHECK((dm * v - lam * v).cwiseAbs().maxCoeff() < 1e-10 * s.max_eigenvalue());
    }
}

TEST_CASE("smallest dense eigenvalue equals smallest sector eigenvalue") {
    KernelSpec spec;
    spec.activation = Activation::Erf;
    spec.depth = 1;
    const int n = 5;
    auto k = kernel_tables(spec, n);
    auto dm = dense_kernel(k, KernelKind::Ntk);
    auto s = sector_eigenvalues(k, KernelKind::Ntk);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dm);
    const double lmin_dense = es.eigenvalues()[0];
    const double lmin = s.min_eigenvalue();
    CHECK(std::abs(lmin_dense - lmin) < 1e-8 * std::max(std::abs(lmin), s.max_eigenvalue() * 1e-9));
}

TEST_CASE("sigmoid CK is entrywise positive (positive activation)") {
    KernelSpec spec;
    spec.activation = Activation::Sigmoid;
    auto k = kernel_tables(spec, 6);
    for (double v : k.f_ck) CHECK(v > 0);
}

TEST_CASE("weak bias ordering holds for generated kernels") {
    auto rng = make_stream(3);
    std::uniform_real_distribution<double> sw(0.6, 1.5), sb(0.0, 0.3);
    std::uniform_int_distribution<int> act(0, 4), dep(1, 2), nn(3, 7);
    for (int rep = 0; rep < 12; ++rep) {
        KernelSpec spec;
        spec.activation = Activation(act(rng));
        spec.depth = dep(rng);
        spec.weight_variance = sw(rng);
        spec.bias_variance = sb(rng);
        const int n = nn(rng);
        auto k = kernel_tables(spec, n);
        for (KernelKind kind : {KernelKind::Ntk, KernelKind::Ck}) {
            auto s = sector_eigenvalues(k, kind);
            auto r = weak_bias_check(s);
            INFO(to_string(spec.activation), " depth=", spec.depth, " n=", n,
                 " kind=", to_string(kind));
            CHECK(r.ordering_ok);
            CHECK((r.maximal_sector == 0 || r.maximal_sector == 1));
        }
    }
}

TEST_CASE("strictly positive spectra for analytic activations") {
    for (Activation a : {Activation::Erf, Activation::Tanh, Activation::Sigmoid}) {
        KernelSpec spec;
        spec.activation = a;
        auto k = kernel_tables(spec, 6);
        CHECK(sector_eigenvalues(k, KernelKind::Ntk).min_eigenvalue() > 0);
        CHECK(sector_eigenvalues(k, KernelKind::Ck).min_eigenvalue() > 0);
    }
}

TEST_CASE("relu depth-1 kernels have exactly vanishing high odd sectors") {
    KernelSpec spec;
    spec.activation = Activation::Relu;
    auto k = kernel_tables(spec, 7);
    auto s = sector_eigenvalues(k, KernelKind::Ntk);
    // the arc-cosine profile has a single odd power of rho, so sectors 3,5,7
    // vanish identically; the clamp maps them to exact zeros
    CHECK(s.eigenvalues[3] == 0.0);
    CHECK(s.eigenvalues[5] == 0.0);
    CHECK(s.eigenvalues[7] == 0.0);
    CHECK(s.eigenvalues[1] > 0.0);
    // relu with Phi >= 0 makes sector 0 maximal
    auto r = weak_bias_check(s);
    CHECK(r.maximal_sector == 0);
}

TEST_CASE("unique eigenvalues decrease strictly for relu") {
    KernelSpec spec;
    spec.activation = Activation::Relu;
    auto k = kernel_tables(spec, 6);
    auto s = sector_eigenvalues(k, KernelKind::Ntk);
    // nonzero eigenvalues keep decreasing with the sector index
    double prev = s.eigenvalues[0];
    for (int m = 1; m <= 6; ++m) {
        if (s.eigenvalues[m] == 0.0) continue;
        CHECK(s.eigenvalues[m] < prev);
        prev = s.eigenvalues[m];
    }
}
