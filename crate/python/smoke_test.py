"""Smoke test for the hypospec extension module.

Build first (see README), then run: python3 python/smoke_test.py
"""

import math

import hypospec


def box_spectrum():
    # 21^3 interior lattice on (-1, 1)^3 with h = 1/11; closed form is known.
    h = 1.0 / 11.0
    op = hypospec.Operator(
        hypospec.Domain.cube(1.0), h=h, bbox=(-1, 1, -1, 1, -1, 1), mode="euclidean"
    )
    assert op.size == 21**3, op.size
    spec = op.solve(4)
    mode = [4.0 / h**2 * math.sin(j * math.pi / 44) ** 2 for j in (1, 2)]
    exact = [3 * mode[0]] + [2 * mode[0] + mode[1]] * 3
    for got, want in zip(spec.values, exact):
        assert abs(got - want) <= 1e-8 * want, (got, want)
    print(f"box: N = {op.size}, lambda_1 = {spec.values[0]:.6f}")


def torus_pipeline():
    torus = hypospec.Domain.torus(2.0, 0.0, 1.0)
    assert not torus.classify().characteristic
    op = hypospec.Operator(torus, h=0.2, bbox=(-3.2, 3.2, -3.2, 3.2, -1.2, 1.2))
    spec = op.solve(9, seed=42)
    values = spec.values
    assert all(a <= b for a, b in zip(values, values[1:]))
    rows = [hypospec.check(name, values, k) for k in range(1, 9)
            for name in ("yang_first", "ppw_gap", "yang_second")]
    assert all(r.slack >= -0.02 * r.rhs for r in rows)
    commutator = op.commutator_bounds(spec, kmax=3)
    assert commutator and all(r.satisfied for r in commutator)
    print(f"torus: N = {op.size}, lambda_1..9 = {values[0]:.3f}..{values[-1]:.3f}, "
          f"{len(rows)} Dirichlet rows, {len(commutator)} commutator rows")


def ball_poles():
    pts = hypospec.Domain.greiner_ball(1.5, sigma=2).classify().points
    assert len(pts) == 2
    assert all(rho < 1e-6 and abs(abs(t) - 1.5**4) < 1e-6 for rho, t in pts), pts
    print(f"ball: characteristic points {pts}")


def scalar_checks():
    lam = 7.5
    root = hypospec.next_eigenvalue_bound([lam], 1, n=2)
    assert abs(root - 2 * lam) <= 1e-12 * lam
    assert hypospec.check_couple(2, 2, lam=33.0).accepted
    rejected = hypospec.check_couple(2, 1, gate=False)
    assert not rejected.accepted and rejected.worst_residual > 0
    try:
        hypospec.check("dirichlet_general", [1.0, 2.0], 1, alpha=2.0, beta=1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("inadmissible exponents accepted")
    for suite in ("power_mean", "chebyshev", "generalized_chebyshev"):
        s = hypospec.run_trials(suite, 2000, seed=1)
        assert s.violations == 0, suite
    print("scalar checks ok")


if __name__ == "__main__":
    box_spectrum()
    torus_pipeline()
    ball_poles()
    scalar_checks()
    print("smoke test passed")
