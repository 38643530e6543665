"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line with its timing."""
import time

import numpy as np
import pytest

from stationary_discs.birkhoff import MatrixLoop, factorize, maslov_index, partial_indices, symbol
from stationary_discs.circlefns import CircleFunction, circle_points, harmonic_extension, winding_number
from stationary_discs.jets import jet_at_one, jet_bound, rank_profile
from stationary_discs.modeldisc import (
    ModelHypersurface,
    build_h,
    g_prime_zero,
    is_admissible,
    levi_coefficients,
    random_unit_vectors,
    scale_model_automorphism,
    solve_g,
)
from stationary_discs.polyalgebra import sum_of_powers, validate_hermitian
from stationary_discs.rhsolver import (
    PerturbedHypersurface,
    boundary_residual,
    build_G,
    det_A_error,
    disc_family,
    linearize,
    newton_attach,
    reduce_to_A,
)

NF = 48


def tilted():
    return validate_hermitian({((2,), (2,)): 1, ((3,), (1,)): 0.3, ((1,), (3,)): 0.3}, (1,))


def weighted():
    return validate_hermitian({((2, 0), (2, 0)): 1, ((0, 1), (0, 1)): 1}, (2, 4))


def quintic(P, eps):
    return PerturbedHypersurface(ModelHypersurface(P), {((3,), (2,), 0): eps, ((2,), (3,), 0): eps})


def admissible_vs(P, count, seed):
    out = []
    for v in random_unit_vectors(P.n, 4 * count, seed):
        if is_admissible(P, v)[0]:
            out.append(v)
        if len(out) == count:
            return out
    raise AssertionError("not enough admissible directions")


def verdict(record_property, number, title, checks, elapsed, limit):
    checks = dict(checks, runtime=elapsed < limit)
    failed = [k for k, ok in checks.items() if not ok]
    status = "PASS" if not failed else "FAIL"
    line = f"criterion {number}: {status}  {title}  ({elapsed:.2f}s / {limit}s)"
    if failed:
        line += "  failed: " + ", ".join(failed)
    record_property("acceptance", line)
    print(line)
    assert not failed, line


def test_criterion_01_index_formula(record_property):
    checks, worst = {}, 0.0
    for n, d in [(1, 4), (2, 4), (1, 6)]:
        t0 = time.perf_counter()
        P = sum_of_powers(n, d)
        ind = winding_number(levi_coefficients(P, np.ones(n) / np.sqrt(n), 64).detQ)
        worst = max(worst, time.perf_counter() - t0)
        checks[f"n={n},d={d}: {ind}=={n * (P.k0 - d // 2 + 1)}"] = ind == n * (P.k0 - d // 2 + 1)
    verdict(record_property, 1, "winding of Q^v equals n(k0-d/2+1)", checks, worst, 1.0)


def test_criterion_02_determinant_identity(record_property):
    t0 = time.perf_counter()
    checks = {}
    for name, P in [("|z|^4", sum_of_powers(1, 4)), ("tilted", tilted()),
                    ("pair", sum_of_powers(2, 4)), ("weighted", weighted())]:
        err = max(det_A_error(P, v, 32, 512) for v in admissible_vs(P, 20, 11))
        checks[f"{name} err={err:.1e}"] = err < 1e-8
    verdict(record_property, 2, "det A = (2i)^n Q' on 512 samples", checks, time.perf_counter() - t0, 5.0)


def test_criterion_03_boundary_identity(record_property):
    t0 = time.perf_counter()
    checks = {}
    for name, P, v in [("|z|^4", sum_of_powers(1, 4), [1.0]), ("tilted", tilted(), [0.7 - 0.4j]),
                       ("pair", sum_of_powers(2, 4), [0.6, 0.8j])]:
        h = build_h(v, P.weight.m, 64)
        z = circle_points(512, 0.5)
        u = P.poly.evaluate_many(np.stack([hi(z) for hi in h], -1)).real
        sup = np.max(np.abs(solve_g(P, v, 64)(z).real - u))
        checks[f"{name} sup={sup:.1e}"] = sup < 1e-10
        # FFT route: harmonic extension of sampled boundary values
        samples = P.poly.evaluate_many(np.stack([hi.samples(1024) for hi in h], -1)).real
        fft = harmonic_extension(CircleFunction.from_samples(samples, 64).real, anchor=1.0).coeff(1)
        closed = g_prime_zero(P, v, 64)
        checks[f"{name} g'(0) closed vs FFT"] = abs(closed - fft) < 1e-10
    checks["|z|^4 g'(0) = -8"] = abs(g_prime_zero(sum_of_powers(1, 4), [1.0]) + 8) < 1e-10
    verdict(record_property, 3, "Re g = P(h) and g'(0) closed form", checks, time.perf_counter() - t0, 1.0)


def test_criterion_04_family_dimension(record_property):
    t0 = time.perf_counter()
    P = sum_of_powers(1, 4)
    S = linearize(P, [1.0], 128)
    expected = 2 * (P.n + 1) * (P.k0 + 1) - P.d * P.n
    checks = {f"|z|^4 kernel {S.kernel_dim} == {expected}": S.kernel_dim == expected,
              f"|z|^4 gap {S.gap:.1e} >= 1e6": S.gap >= 1e6}
    pair = sum_of_powers(2, 4)
    T = linearize(pair, [0.6, 0.8], 64)
    l3_bound = 2 * pair.n * (2 * pair.k0 - pair.d) + 2 * pair.n
    checks[f"pair kernel {T.kernel_dim} <= 16"] = T.kernel_dim <= 16 and T.gap >= 1e6
    checks[f"pair L3 {T.l3_kernel_dim} <= {l3_bound}"] = T.l3_kernel_dim <= l3_bound
    checks[f"|z|^4 L3 {S.l3_kernel_dim} <= 2"] = S.l3_kernel_dim <= 2
    verdict(record_property, 4, "kernel dimension of the linearized problem", checks, time.perf_counter() - t0, 30.0)


def test_criterion_05_partial_indices(record_property):
    t0 = time.perf_counter()
    checks = {}
    for name, P, v in [("|z|^4", sum_of_powers(1, 4), [1.0]), ("tilted", tilted(), [1.0]),
                       ("pair", sum_of_powers(2, 4), [0.6, 0.8]), ("|z|^6", sum_of_powers(1, 6), [1.0]),
                       ("weighted", weighted(), [0.6, 0.8])]:
        L = symbol(reduce_to_A(build_G(P, v, 32), P.weight.m, P.d))
        kappa = partial_indices(L, 6)
        ind_q = winding_number(levi_coefficients(P, v, 32).detQ)
        expect = -2 * sum(P.weight.m) + 2 * ind_q
        checks[f"{name} {kappa} >= 0"] = min(kappa) >= 0
        checks[f"{name} sum {sum(kappa)} == {expect}"] = sum(kappa) == expect == maslov_index(L)
    verdict(record_property, 5, "partial indices of -conj(A)^-1 A", checks, time.perf_counter() - t0, 60.0)


def test_criterion_06_newton(record_property):
    t0 = time.perf_counter()
    P = sum_of_powers(1, 4)
    S = linearize(P, [1.0], NF)
    rng = np.random.default_rng(0)
    start = S.layout.to_disc(1e-3 * rng.normal(size=S.layout.size), S.base)
    back = newton_attach(ModelHypersurface(P), S, start=start)
    surf = quintic(P, 1e-3)
    res = newton_attach(surf, S)
    checks = {f"theta=0 distance {back.disc.distance(S.base):.1e}": back.disc.distance(S.base) < 1e-8,
              f"eps=1e-3 residual {res.residual:.1e}": boundary_residual(surf, res.disc, 2048) < 1e-9,
              "divisibility flags": all(res.flags)}
    verdict(record_property, 6, "Newton attachment", checks, time.perf_counter() - t0, 30.0)


def test_criterion_07_invariance(record_property):
    t0 = time.perf_counter()
    P = sum_of_powers(1, 4)
    S = linearize(P, [1.0], NF)
    surf = quintic(P, 1e-3)
    disc = newton_attach(surf, S).disc
    checks = {}
    for t, phases in [(0.5, None), (2.0, None), (1.0, [0.9]), (0.7, [-1.3])]:
        r = boundary_residual(surf.transformed(t, phases), scale_model_automorphism(disc, (1,), 4, t, phases))
        checks[f"|z|^4+theta t={t} phi={phases} res={r:.1e}"] = r < 1e-8
    pair = sum_of_powers(2, 4)
    base = linearize(pair, [0.6, 0.8], 32).base
    for t, phases in [(1.5, [0.3, -1.1]), (0.8, None)]:
        r = boundary_residual(ModelHypersurface(pair), scale_model_automorphism(base, (1, 1), 4, t, phases))
        checks[f"pair t={t} phi={phases} res={r:.1e}"] = r < 1e-8
    verdict(record_property, 7, "scalings and rotations preserve solutions", checks, time.perf_counter() - t0, 10.0)


def test_criterion_08_jet_determination(record_property):
    t0 = time.perf_counter()
    P = sum_of_powers(1, 4)
    S = linearize(P, [1.0], NF)
    prof = rank_profile(S.kernel_discs(), 8)
    star = prof["saturation"]
    refined = jet_bound(P, [1.0])["refined"]
    checks = {f"saturation {star} <= refined {refined}": star is not None and star <= refined,
              f"saturation <= 6nd = {6 * P.n * P.d}": star is not None and star <= 6 * P.n * P.d}
    rng = np.random.default_rng(8)
    grid = [1e-3 * rng.normal(size=S.kernel_dim) for _ in range(16)]
    out = disc_family(ModelHypersurface(P), S, grid)
    checks["16 grid discs attached"] = all(r["ok"] for r in out)
    if star is not None and checks["16 grid discs attached"]:
        discs = [r["result"].disc for r in out]
        jets = [jet_at_one(f, star) for f in discs]
        clash = [(i, j) for i in range(16) for j in range(i + 1, 16)
                 if discs[i].distance(discs[j]) > 1e-8 and jets[i].distance(jets[j]) < 1e-10]
        checks["no distinct discs with equal jets"] = not clash
    verdict(record_property, 8, "jet map saturates on the kernel", checks, time.perf_counter() - t0, 30.0)


def test_criterion_09_birkhoff_oracles(record_property):
    t0 = time.perf_counter()
    nf = 24
    checks = {}
    loops = []
    for exps in ([2, -1], [0, 0], [1, 1, -2], [3, 0]):
        L = MatrixLoop.diagonal(exps, nf)
        got = partial_indices(L, 5)
        checks[f"diag {exps} -> {got}"] = got == sorted(exps)
        loops.append(L)
    tri = MatrixLoop.from_modes([[{1: 1}, {0: 1}], [{}, {-1: 1}]], nf)
    got = partial_indices(tri, 4)
    checks[f"[[z,1],[0,1/z]] -> {got} == [0, 0]"] = got == [0, 0]
    loops.append(tri)
    U = np.array([[1, 2], [0.5, 3j]])
    V = np.array([[2, 1], [1, 1]])
    loops.append(MatrixLoop.from_samples(U @ MatrixLoop.diagonal([1, 0], nf).samples(4 * nf + 4) @ V, nf))
    worst = max(factorize(L, 5).residual / L.norm() for L in loops)
    checks[f"reconstruction {worst:.1e} < 1e-6"] = worst < 1e-6
    verdict(record_property, 9, "Birkhoff factorization oracles", checks, time.perf_counter() - t0, 10.0)


def test_criterion_10_negative_control(record_property):
    t0 = time.perf_counter()
    P = validate_hermitian({((3,), (1,)): 1, ((1,), (3,)): 1}, (1,))
    rejected = sum(not is_admissible(P, v)[0] for v in random_unit_vectors(1, 100, 2024))
    checks = {f"{rejected}/100 rejected": rejected == 100}
    verdict(record_property, 10, "z^3 zbar + z zbar^3 is never admissible", checks, time.perf_counter() - t0, 5.0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
