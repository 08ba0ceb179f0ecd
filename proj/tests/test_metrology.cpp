#include <doctest.h>

#include <cmath>
#include <limits>

#include "dqsnet/metrology.hpp"
#include "dqsnet/reports.hpp"
#include "support/oracles.hpp"

using namespace dqsnet;
using metrology::DepolarizedGhzModel;
using metrology::SensingProblem;

namespace {

// Bisection on eta(F) - 1; eta is increasing in F above the maximally mixed
// point, so this pins the threshold independently of the closed form.
double threshold_by_bisection(int d, int n) {
    double lo = std::exp2(-static_cast<double>(n) * d) + 1e-9, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (metrology::advantage_depolarized({mid, d, n, 1.0}) > 1.0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("GhzDiagonalState invariants") {
    CHECK_THROWS(GhzDiagonalState(2, {0.5, 0.5, 0.1, -0.1}));
    CHECK_THROWS(GhzDiagonalState(2, {0.5, 0.6, 0.0, 0.0}));
    CHECK_THROWS(GhzDiagonalState(2, {1.0, 0.0, 0.0}));
    const GhzDiagonalState s(2, {0.5, 0.25, 0.25, 0.0});
    CHECK(s.fidelity() == 0.5);
    CHECK(GhzBasisIndex{5}.partner().value == 4);
    CHECK(GhzBasisIndex{4}.partner().partner().value == 4);
    CHECK(GhzBasisIndex{6}.bitstring() == 3);
    CHECK(GhzBasisIndex{6}.phase_sign() == 1);
    CHECK(GhzBasisIndex{7}.phase_sign() == -1);
}

TEST_CASE("noise coefficient on reference states") {
    for (int m : {2, 3, 5}) {
        CHECK(metrology::noise_coefficient(GhzDiagonalState::pure(m)) == doctest::Approx(0.0));
        const double dim = std::exp2(m);
        std::vector<double> flat(static_cast<std::size_t>(dim), 1.0 / dim);
        CHECK(metrology::noise_coefficient(GhzDiagonalState(m, flat)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    // rank-2 dephased: C = 4F(1-F)
    CHECK(metrology::noise_coefficient(GhzDiagonalState::dephased_rank2(3, 0.8)) ==
          doctest::Approx(4 * 0.8 * 0.2).epsilon(1e-14));
}

TEST_CASE("depolarized coefficient: closed form vs eigenvalue map, d=3 F=0.9") {
    const double c_map = metrology::noise_coefficient(GhzDiagonalState::depolarized(3, 0.9));
    const double c_closed = metrology::depolarized_noise_coefficient({0.9, 3, 1, 1.0});
    CHECK(c_map == doctest::Approx(c_closed).epsilon(1e-13));
    // frozen from both independent routes: (1-F)(4^3 F + 2^3 - 2)/((6F+1) * 7)
    CHECK(c_closed == doctest::Approx(0.141964285714286).epsilon(1e-12));
    // chained average-phase QFI at d=3, n=1
    CHECK(metrology::qfi_average(c_closed, {3, 1}) ==
          doctest::Approx(2.574107142857143).epsilon(1e-12));
}

TEST_CASE("qfi_average basics") {
    CHECK(metrology::qfi_average(0.0, {3, 2}) == doctest::Approx(12.0));
    CHECK(metrology::qfi_average(1.0, {5, 3}) == doctest::Approx(0.0));
    const Eigen::MatrixXd qfim = metrology::qfim_from_coefficient(0.25, {3, 2});
    CHECK(qfim.rows() == 3);
    CHECK(qfim(0, 0) == doctest::Approx(0.75 * 4));
    CHECK(qfim(2, 1) == doctest::Approx(0.75 * 4));
    CHECK_THROWS(metrology::qfi_average(1.5, {3, 1}));
}

TEST_CASE("advantage for the depolarized model") {
    CHECK(metrology::advantage_depolarized({1.0, 3, 2, 1.0}) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(metrology::advantage_depolarized({1.0, 7, 1, 1.0}) == doctest::Approx(7.0).epsilon(1e-12));
    // a maximally mixed register (F = 2^-nd) kills the advantage entirely
    CHECK(metrology::advantage_depolarized({std::exp2(-3.0), 3, 1, 1.0}) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(metrology::advantage_depolarized({std::exp2(-8.0), 2, 4, 1.0}) ==
          doctest::Approx(0.0).epsilon(1e-12));
    const double fth = metrology::fidelity_threshold_depolarized(3, 1);
    CHECK(metrology::advantage_depolarized({fth, 3, 1, 1.0}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS(metrology::advantage_depolarized({0.9, 1, 1, 1.0}));
}

TEST_CASE("fidelity thresholds") {
    CHECK(metrology::fidelity_threshold_depolarized(3, 1) == doctest::Approx(0.50963).epsilon(2e-4));
    // bisection oracle pins the closed form
    for (int d : {2, 3, 4, 6})
        for (int n : {1, 2})
            CHECK(metrology::fidelity_threshold_depolarized(d, n) ==
                  doctest::Approx(threshold_by_bisection(d, n)).epsilon(1e-9));
    CHECK(metrology::fidelity_threshold_depolarized(2, 1) ==
          doctest::Approx(0.730291152402).epsilon(1e-10));
    CHECK(20.0 * metrology::fidelity_threshold_depolarized(20, 1) > 1.0);
    CHECK(20.0 * metrology::fidelity_threshold_depolarized(20, 1) < 1.05);

    // GME boundary behavior
    CHECK(metrology::fidelity_threshold_depolarized(3, 1) > 0.5);
    for (int d = 4; d <= 10; ++d) CHECK(metrology::fidelity_threshold_depolarized(d, 1) < 0.5);

    // full-separability bound
    for (int d = 2; d <= 10; ++d)
        for (int n = 1; n <= 4; ++n)
            CHECK(metrology::fidelity_threshold_depolarized(d, n) >
                  3.0 / (std::exp2(static_cast<double>(n) * d) + 2.0));
}

TEST_CASE("rank-2 dephased threshold") {
    CHECK(metrology::fidelity_threshold_rank2(4) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(metrology::fidelity_threshold_rank2(100) == doctest::Approx(0.55).epsilon(1e-12));
    CHECK_THROWS(metrology::fidelity_threshold_rank2(1));
    for (int d = 2; d <= 40; ++d) CHECK(metrology::fidelity_threshold_rank2(d) > 0.5);
}

TEST_CASE("QFI lower bound and its attainment") {
    CHECK(metrology::qfi_lower_bound(0.5, 7) == doctest::Approx(0.0));
    CHECK(metrology::qfi_lower_bound(1.0, 5) == doctest::Approx(5.0));
    CHECK(metrology::qfi_lower_bound(0.8, 3) == doctest::Approx(1.08).epsilon(1e-14));

    Rng rng(20240811);
    for (int d : {2, 3}) {
        const double fidelity = 0.7;
        const double bound = metrology::qfi_lower_bound(fidelity, d);
        for (int trial = 0; trial < 1000; ++trial) {
            const auto state = testing::random_ghz_diagonal(rng, d, fidelity);
            const double qfi = metrology::qfi_average(metrology::noise_coefficient(state), {d, 1});
            CHECK(qfi >= bound - 1e-9);
        }
        // the rank-2 dephased state saturates the bound
        const double qfi_worst = metrology::qfi_average(
            metrology::noise_coefficient(GhzDiagonalState::dephased_rank2(d, fidelity)), {d, 1});
        CHECK(qfi_worst == doctest::Approx(bound).epsilon(1e-12));
    }
}

TEST_CASE("coefficient is 1 exactly for pairwise-equal weights") {
    GhzDiagonalState equal(2, {0.4, 0.4, 0.1, 0.1});
    CHECK(metrology::noise_coefficient(equal) == doctest::Approx(1.0).epsilon(1e-14));
    GhzDiagonalState unequal(2, {0.41, 0.39, 0.1, 0.1});
    CHECK(metrology::noise_coefficient(unequal) < 1.0 - 1e-5);
}

TEST_CASE("sensor scaling estimate") {
    const auto est = metrology::max_local_sensors(3, 0.9, 0.99);
    CHECK(est.n_max == doctest::Approx(98.82772).epsilon(1e-5));
    // exact integer crossing of eta = 1 agrees within +-5
    const int crossing = reports::advantage_crossing(0.9, 0.99, 3);
    CHECK(std::abs(est.n_max - crossing) <= 5.0);

    CHECK(metrology::max_local_sensors(3, 0.9, 1.0 - 1e-9).n_max > 1e8);
    CHECK_THROWS_AS((void)metrology::max_local_sensors(3, 0.3, 0.99), std::domain_error);

    const auto sens = metrology::max_local_sensors(3, 0.9, 0.9999);
    CHECK(sens.sensitivity_ratio > 100.0);
    CHECK(sens.sensitivity_ratio ==
          doctest::Approx(sens.sensitivity_quality / sens.sensitivity_fidelity).epsilon(1e-12));
}

TEST_CASE("imperfect local strategy comparison") {
    for (double k : {0.5, 0.99, 1.0})
        CHECK(metrology::advantage_local_imperfect(3, 1, k) == doctest::Approx(1.0).epsilon(1e-12));
    // with one sensor per node the ratio reduces to the global advantage
    DepolarizedGhzModel m{0.9, 3, 1, 0.9999};
    CHECK(metrology::global_local_ratio(m) ==
          doctest::Approx(metrology::advantage_depolarized(m)).epsilon(1e-12));
    // the global strategy eventually loses even to the imperfect local one
    bool crossed = false;
    for (int n = 1; n <= 40000 && !crossed; n += 50) {
        DepolarizedGhzModel model{0.9, 3, n, 0.9999};
        if (metrology::global_local_ratio(model) < 1.0) crossed = true;
    }
    CHECK(crossed);
}

TEST_CASE("Heisenberg scaling breaks down under imperfect local generation") {
    auto value = [](int n) {
        return metrology::qfi_average(metrology::depolarized_noise_coefficient({0.9, 3, n, 0.99}),
                                      {3, n});
    };
    // the QFI peaks near n = -2/ln(k) ~ 199, then decays to zero
    CHECK(value(1000) < value(199));
    CHECK(value(3000) < value(1000));
    CHECK(value(5000) < 1e-3);
}

TEST_CASE("azimuthal measurement variance") {
    CHECK(metrology::azimuthal_variance(1.0, 3, 2, M_PI / 12.0, 0.0) ==
          doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(std::isinf(metrology::azimuthal_variance(0.8, 3, 1, 0.0, 0.0)));
    const double a = 0.8 - 0.2 / 7.0;
    CHECK(metrology::azimuthal_variance(0.8, 3, 1, M_PI / 6.0, 0.0) ==
          doctest::Approx(1.0 / (3.0 * a * a)).epsilon(1e-12));
}

TEST_CASE("azimuthal optimization") {
    const auto opt41 = metrology::optimal_azimuthal(1, 4);
    CHECK(opt41.fidelity_threshold == doctest::Approx(17.0 / 32.0).epsilon(1e-15));

    for (int n : {1, 2})
        for (int d : {2, 3}) {
            const auto opt = metrology::optimal_azimuthal(n, d);
            const double expected = M_PI / (2.0 * n * d);
            CHECK(opt.alpha == doctest::Approx(expected).epsilon(1e-12));
            for (double f : {0.75, 0.9}) {
                const double argmin = testing::golden_section_argmin(
                    [&](double alpha) { return metrology::azimuthal_variance(f, d, n, alpha, 0.0); },
                    1e-4, M_PI / (n * d) - 1e-4, 1e-9);
                CHECK(argmin == doctest::Approx(expected).epsilon(1e-6));
                const double vmin = metrology::azimuthal_variance(f, d, n, opt.alpha, 0.0);
                CHECK(vmin == doctest::Approx(opt.min_variance(f)).epsilon(1e-12));
                for (double alpha = 1e-3; alpha < M_PI / (n * d); alpha += 1e-3)
                    CHECK(metrology::azimuthal_variance(f, d, n, alpha, 0.0) >= vmin - 1e-12);
            }
        }
}

TEST_CASE("Bell pair fidelity thresholds") {
    const double golden[] = {0.730, 0.714, 0.711, 0.716, 0.726, 0.738};
    for (int d = 2; d <= 7; ++d)
        CHECK(std::abs(metrology::bell_pair_threshold(d, metrology::Measurement::Optimal) -
                       golden[d - 2]) < 0.001);
    CHECK(metrology::bell_pair_threshold(2, metrology::Measurement::Azimuthal) ==
          doctest::Approx((3.0 + std::sqrt(2.0)) / (4.0 * std::sqrt(2.0))).epsilon(1e-12));
    // asymptotic 2:1 infidelity relationship between the two readouts
    const double eps_opt = 1.0 - metrology::bell_pair_threshold(30, metrology::Measurement::Optimal);
    const double eps_az = 1.0 - metrology::bell_pair_threshold(30, metrology::Measurement::Azimuthal);
    CHECK(eps_opt / eps_az == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("numeric QFIM vs closed form") {
    SensingProblem p31{3, 1};
    const Eigen::MatrixXd pure = metrology::qfim_numeric(densmat::DensityMatrix::ghz(3), p31);
    CHECK((pure - Eigen::MatrixXd::Ones(3, 3)).cwiseAbs().maxCoeff() < 1e-9);

    const Eigen::MatrixXd mixed =
        metrology::qfim_numeric(densmat::DensityMatrix::maximally_mixed(3), p31);
    CHECK(mixed.cwiseAbs().maxCoeff() < 1e-9);

    for (int d : {2, 3})
        for (int n : {1, 2}) {
            if (d * n > densmat::kMaxQubits) continue;
            for (double f : {0.7, 0.9}) {
                const SensingProblem problem{d, n};
                const auto rho = densmat::DensityMatrix::depolarized_ghz(d * n, f);
                const Eigen::MatrixXd numeric = metrology::qfim_numeric(rho, problem);
                const double c = metrology::depolarized_noise_coefficient({f, d, n, 1.0});
                const Eigen::MatrixXd closed = metrology::qfim_from_coefficient(c, problem);
                CHECK((numeric - closed).cwiseAbs().maxCoeff() < 1e-8);
            }
        }

    // Random states from the family where the ones-matrix identity is exact:
    // the standard partner pair may be asymmetric, every other partner pair
    // carries equal weights. (A lopsided pair on a mixed bit pattern breaks
    // the identity: its generator matrix elements carry per-node signs, e.g.
    // a pure |01>+|10> probe has zero QFI for the phase average.)
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto weights = testing::dirichlet(rng, 5);
        std::vector<double> ev(8, 0.0);
        ev[0] = weights[0] + 0.3;
        ev[1] = weights[1];
        for (int pair = 1; pair < 4; ++pair)
            ev[2 * pair] = ev[2 * pair + 1] = 0.5 * weights[pair + 1] * (0.7 / 1.3);
        double sum = 0.0;
        for (double v : ev) sum += v;
        for (double& v : ev) v /= sum;
        const GhzDiagonalState state(3, std::move(ev));
        const Eigen::MatrixXd numeric =
            metrology::qfim_numeric(densmat::DensityMatrix::from_ghz_diagonal(state), p31);
        const Eigen::MatrixXd closed =
            metrology::qfim_from_coefficient(metrology::noise_coefficient(state), p31);
        CHECK((numeric - closed).cwiseAbs().maxCoeff() < 1e-8);
    }

    // the sign structure outside that family is physical: an equal mixture of
    // phase-partnered |01>+-|10> states carries no average-phase information
    const SensingProblem p21{2, 1};
    const Eigen::MatrixXd psi_plus =
        metrology::qfim_numeric(densmat::DensityMatrix::ghz_basis_state(2, GhzBasisIndex{2}), p21);
    CHECK(psi_plus(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(psi_plus(0, 1) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(metrology::qfi_average_from_qfim(psi_plus) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("coefficient monotonicity in F and k (finite differences)") {
    const double h = 1e-6;
    for (int d : {2, 3, 4})
        for (int n : {1, 2, 3, 5})
            for (double f : {0.3, 0.6, 0.9})
                for (double k : {0.3, 0.6, 0.99}) {
                    if (f <= std::exp2(-d) || k <= std::exp2(-d)) continue;
                    auto c = [&](double ff, double kk) {
                        return metrology::depolarized_noise_coefficient({ff, d, n, kk});
                    };
                    CHECK((c(f + h, k) - c(f - h, k)) / (2 * h) < 0.0);
                    const double dk = (c(f, k + h) - c(f, k - h)) / (2 * h);
                    if (n == 1) CHECK(std::abs(dk) < 1e-9);  // k enters as k^(n-1)
                    else CHECK(dk < 0.0);
                }
}

TEST_CASE("orthonormal extension") {
    for (int d = 2; d <= 8; ++d) {
        const Eigen::MatrixXd m = metrology::orthonormal_extension(d);
        CHECK((m * m.transpose() - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
        for (int j = 0; j < d; ++j)
            CHECK(m(0, j) == doctest::Approx(1.0 / std::sqrt(d)).epsilon(1e-12));
        // the transformed all-ones matrix concentrates in the (0,0) entry
        Eigen::MatrixXd t = m * Eigen::MatrixXd::Ones(d, d) * m.transpose();
        CHECK(t(0, 0) == doctest::Approx(static_cast<double>(d)).epsilon(1e-12));
        t(0, 0) = 0.0;
        CHECK(t.cwiseAbs().maxCoeff() < 1e-12);
    }
    const Eigen::MatrixXd m2 = metrology::orthonormal_extension(2);
    CHECK(std::abs(m2(1, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(m2(1, 0) == doctest::Approx(-m2(1, 1)).epsilon(1e-12));
}
