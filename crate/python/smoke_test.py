"""Smoke test for the lapgrowth extension module.

Build and install first, for example:

    pip install maturin
    maturin develop --release -m crates/py/Cargo.toml

then run ``python python/smoke_test.py``.
"""

import math

import lapgrowth


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    lattice = lapgrowth.Lattice(10)
    assert lattice.k_max == 10
    assert lattice.counting(16.0) == 30
    assert len(lattice.circle(3)) == 8
    assert abs(lattice.reciprocal_sum(1000.0)) <= 1e-12

    product = lapgrowth.Product()
    f1 = product.f(1 + 0j)
    assert close(f1.real, 0.74707027, 1e-8), f1
    assert product.log_f(2 + 0j)[0] == -math.inf

    assert lapgrowth.taylor_coefficient(2) == -0.25
    g4 = lapgrowth.borel(4 + 0j)
    assert close(g4.real, 0.24213886327016976, 1e-12), g4
    try:
        lapgrowth.borel(2 + 0j)
    except ArithmeticError:
        pass
    else:
        raise AssertionError("g inside |s| < 2.5 must fail")

    laplace = lapgrowth.Laplace()
    for z in (0j, 1 + 1j, -2 + 0.5j, 3 - 2j):
        f = product.f(z)
        assert abs(laplace.inversion(z) - f) <= 1e-7 * (1 + abs(f)), z
        residual = abs(laplace.big_f(z) + laplace.u(z) - f)
        assert residual <= 1e-7 * (1 + abs(f)), (z, residual)
    assert close(abs(laplace.u(0j)), 0.0438414, 1e-5)

    radii = [2.0 ** (k + i / 128) for k in range(8, 14) for i in range(128)]
    irregular = lapgrowth.classify(radii, product.profile(0.0, radii), function_id="f")
    assert irregular["verdict"] == "irregular", irregular
    regular = lapgrowth.classify(radii, [2.0] * len(radii), function_id="exp_2z")
    assert regular["verdict"] == "regular" and regular["limit_or_gap"] == 2.0, regular

    print("lapgrowth smoke test passed")


if __name__ == "__main__":
    main()
