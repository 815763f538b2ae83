"""Smoke tests for the ccsura extension module.

Runs against the module in the build tree (PYTHONPATH is set by ctest).
"""

import numpy as np

import ccsura


def toy_params(k=2):
    return ccsura.SystemParams(k=k, w=24, l=16, v=3, n=112, iters=10)


def test_fwht_known_vector():
    out = ccsura.fwht(np.array([1.0, -1.0, 0.0, 0.0]))
    assert np.allclose(out, [0.0, 2.0, 0.0, 2.0])


def test_fwht_involution():
    rng = np.random.default_rng(3)
    x = rng.normal(size=64)
    twice = ccsura.fwht(ccsura.fwht(x))
    assert np.allclose(twice, 64.0 * x)


def test_encode_checks():
    graph = ccsura.OuterGraph.ring(16, 16)
    payload = bytes(range(16))
    values = ccsura.encode(payload, graph)
    assert len(values) == 16
    assert ccsura.checks_satisfied(values, graph)
    indices = ccsura.index_map(values, graph)
    assert [i >> 16 for i in indices] == list(range(16))


def test_operator_adjoint_identity():
    params = toy_params()
    op = ccsura.make_operator(ccsura.SensingKind.BlockDiagonal, params, 7)
    rng = np.random.default_rng(11)
    x = rng.normal(size=op.width)
    z = rng.normal(size=op.rows)
    lhs = float(np.dot(op.forward(x), z))
    rhs = float(np.dot(x, op.adjoint(z)))
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


def test_check_to_var_deltas():
    mu_a = np.zeros(8)
    mu_b = np.zeros(8)
    mu_a[3] = 1.0
    mu_b[4] = 1.0
    out = ccsura.check_to_var(mu_a, mu_b, ccsura.CheckDirection.ToParity)
    assert np.argmax(out) == 7
    assert np.isclose(out[7], 1.0)


def test_pme_range():
    assert ccsura.pme(1.0, 1.0, 1.0, 0.0) == 0.0
    assert ccsura.pme(1.0, 1.0, 1.0, 1.0) == 1.0
    mid = ccsura.pme(0.5, 1.0, 1.0, 0.5)
    assert abs(mid - 0.5) < 1e-12


def test_noiseless_pipeline_roundtrip():
    params = toy_params(k=1)
    graph = ccsura.OuterGraph.ring(params.l, params.v)
    profile = ccsura.PowerProfile.uniform(params, 4.0)
    for case_id in (1, 2, 3, 4):
        kind = (
            ccsura.SensingKind.BlockDiagonal
            if case_id in (1, 4)
            else ccsura.SensingKind.Dense
        )
        op = ccsura.make_operator(kind, params, 14)
        trial = ccsura.gen_trial(params, profile, graph, op, 20, noiseless=True)
        shat, decoded = ccsura.run_pipeline(case_id, trial.y, params, profile, graph, op)
        report = ccsura.pupe(trial.payloads, decoded)
        assert report.pupe == 0.0, f"case {case_id} failed to decode"
        assert shat.shape[0] == params.width


def test_run_point_deterministic():
    params = toy_params(k=2)
    a = ccsura.run_point(4, 3.0, trials=2, base_seed=5, params=params)
    b = ccsura.run_point(4, 3.0, trials=2, base_seed=5, params=params)
    assert a.mean_pupe == b.mean_pupe
    assert 0.0 <= a.mean_pupe <= 1.0


def main():
    tests = [(name, fn) for name, fn in sorted(globals().items()) if name.startswith("test_")]
    for name, fn in tests:
        fn()
        print(f"{name}: ok")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
