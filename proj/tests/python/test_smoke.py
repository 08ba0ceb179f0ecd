"""Smoke tests for the python bindings: import, a few pinned values, one
tiny deterministic campaign. The full numerical coverage lives in the C++
suites; this only proves the bindings expose working objects."""

import math
import sys

import dqsnet


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} within {tol}"


def main():
    # closed-form metrology
    approx(dqsnet.fidelity_threshold_depolarized(3), 0.50963, 1e-4)
    approx(dqsnet.fidelity_threshold_rank2(4), 0.75, 1e-12)
    approx(dqsnet.qfi_lower_bound(0.8, 3), 1.08, 1e-12)
    approx(dqsnet.bell_pair_threshold(2, "optimal"), 0.730291152402, 1e-9)
    alpha, fth = dqsnet.optimal_azimuthal(1, 4)
    approx(fth, 17.0 / 32.0, 1e-12)
    assert math.isinf(dqsnet.azimuthal_variance(0.8, 3, 1, 0.0, 0.0))

    state = dqsnet.GhzDiagonalState.depolarized(3, 0.9)
    c = dqsnet.noise_coefficient(state)
    approx(c, 0.141964285714286, 1e-12)
    model = dqsnet.DepolarizedGhzModel(0.9, 3)
    approx(dqsnet.depolarized_noise_coefficient(model), c, 1e-13)

    # bell algebra
    out = dqsnet.swap(dqsnet.BellDiagonalState([1, 0, 0, 0]),
                      dqsnet.BellDiagonalState([1, 0, 0, 0]), 0.9, 1.0, 1.0)
    approx(out.lambdas[0], 0.925, 1e-12)
    _, ps, fs = dqsnet.purify(dqsnet.BellDiagonalState.werner(0.8),
                              dqsnet.BellDiagonalState.werner(0.8))
    approx(ps, 173.0 / 225.0, 1e-12)
    approx(fs, 145.0 / 173.0, 1e-12)

    # estimation
    weights, combined = dqsnet.combine_inverse_variance([1.0, 2.0, 4.0])
    approx(combined, 4.0 / 7.0, 1e-12)
    approx(weights[0], 4.0 / 7.0, 1e-12)
    assert dqsnet.configuration_count(5) == 27
    approx(dqsnet.hybrid_variance(3, [0], [0.5], 0.25), 0.5 / 3 + 2 * 0.25 / 3, 1e-12)

    # resource table
    assert dqsnet.resource_estimate("teleportation", 3) == (7, 4, 4, 2.0)
    assert dqsnet.resource_estimate("merging", 3) == (4, 2, 2, 1.0)

    # deterministic micro-campaign
    scenario = dqsnet.NetworkScenario.preset(3)
    scenario.window_s = 0.02
    a = dqsnet.run_campaign(scenario, 20, 11)
    b = dqsnet.run_campaign(scenario, 20, 11)
    assert a.successes == b.successes
    assert a.successes > 0
    assert a.fidelity == b.fidelity
    assert a.results_csv() == b.results_csv()

    # scenario text round trip
    parsed = dqsnet.NetworkScenario.parse(scenario.serialize())
    assert parsed.window_s == scenario.window_s
    assert parsed.raw_fidelity == scenario.raw_fidelity

    print("python smoke: all checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
