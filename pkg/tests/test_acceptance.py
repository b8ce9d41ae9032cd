"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
log lines (tolerances and runtime budgets are asserted either way).
"""

import math
import time

import numpy as np

from qnckit.characteristic import (
    char_batch,
    char_surface,
    pure_state_component,
    schmidt_pure_state,
)
from qnckit.entanglement import decomposition_from_isometry, entanglement_E, productize
from qnckit.matrix_core import (
    DensityMatrix,
    apply_local_unitary,
    kron,
    mix_local_unitaries,
    random_density_matrix,
    random_isometry,
    random_pure_density,
    random_unitary,
    trace_norm,
)
from qnckit.measurement import omega_volume, params_from_ket
from qnckit.steering import main_normal_constancy, polytope_diagnostics, steering_surface
from qnckit.strength import IntegratorConfig, strength, strength_directed
from qnckit.tomography import (
    conditional_oracle_from_state,
    oracle_from_state,
    reconstruct_bipartite,
    reconstruct_state,
)

FINE = IntegratorConfig(grid=128)

ROTATION = np.array([[math.sqrt(3) / 2, 0.5], [0.5, -math.sqrt(3) / 2]])


def classical_mixture() -> DensityMatrix:
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 0.5
    m[3, 3] = 0.5
    return DensityMatrix(m, split=(2, 2))


def report(num: int, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} criterion {num:2d}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def midpoint_grid(k: int):
    th = (np.arange(k) + 0.5) * math.pi / k
    ph = (np.arange(k) + 0.5) * 2 * math.pi / k
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    return tt.ravel()[:, None], pp.ravel()[:, None]


def test_criterion_01_closed_form_components():
    start = time.perf_counter()
    thetas, phis = midpoint_grid(32)
    worst = 0.0
    for alpha in (math.pi / 8, math.pi / 4, math.pi / 3):
        for gamma in (0.0, 1.0):
            batch = char_batch(schmidt_pure_state(alpha, gamma), thetas, phis)
            expect = np.array([pure_state_component(alpha, t) for t in thetas[:, 0]])
            worst = max(
                worst,
                float(np.max(np.abs(batch.components[:, 0] - expect))),
                float(np.max(np.abs(batch.components[:, 1] - expect))),
            )
    elapsed = time.perf_counter() - start
    report(
        1,
        worst <= 1e-9 and elapsed < 2.0,
        f"closed-form components on 32x32 grid, max err {worst:.2e}, {elapsed:.2f}s",
    )


def test_criterion_02_pure_state_strength():
    start = time.perf_counter()
    worst = 0.0
    zero_val = None
    for alpha in (0.0, math.pi / 8, math.pi / 6, math.pi / 4, math.pi / 3):
        res = strength(schmidt_pure_state(alpha), FINE)
        err = abs(res.value - abs(math.sin(2 * alpha)))
        if alpha == 0.0:
            zero_val = res.value
        worst = max(worst, err)
    elapsed = time.perf_counter() - start
    report(
        2,
        worst <= 5e-4 and abs(zero_val) <= 1e-12 and elapsed < 10.0,
        f"G = |sin 2a| on pure states, max err {worst:.2e}, G(0) = {zero_val:.1e}, {elapsed:.2f}s",
    )


def test_criterion_03_directed_symmetry():
    rng = np.random.default_rng(301)
    worst = 0.0
    for _ in range(10):
        rho = random_pure_density(4, rng, split=(2, 2))
        ab = strength_directed(rho, "AB", FINE)
        ba = strength_directed(rho, "BA", FINE)
        worst = max(worst, abs(ab.value - ba.value))
    report(3, worst <= 2e-3, f"|G_AB - G_BA| on 10 random pure states, max {worst:.2e}")


def test_criterion_04_unmeasured_side_invariance():
    rng = np.random.default_rng(401)
    worst = 0.0
    for _ in range(10):
        rho = random_density_matrix(4, rng, split=(2, 2))
        rotated = apply_local_unitary(rho, None, random_unitary(2, rng))
        b1 = char_surface(rho, 32, as_batch=True)
        b2 = char_surface(rotated, 32, as_batch=True)
        worst = max(worst, float(np.max(np.abs(b1.magnitude - b2.magnitude))))
    report(4, worst <= 1e-10, f"B-side unitary leaves |F| surfaces pointwise equal, max dev {worst:.2e}")


def test_criterion_05_lu_invariance_and_rotated_surface():
    rng = np.random.default_rng(501)
    worst = 0.0
    for _ in range(20):
        rho = random_pure_density(4, rng, split=(2, 2))
        ua, ub = random_unitary(2, rng), random_unitary(2, rng)
        g0 = strength(rho, FINE)
        g1 = strength(apply_local_unitary(rho, ua, ub), FINE)
        margin = abs(g0.value - g1.value) - 2 * (g0.error_estimate + g1.error_estimate)
        worst = max(worst, margin)
    lu_ok = worst <= 1e-3

    # rotated-surface reproduction: evaluate the rotated state at the
    # transported measurement points and compare |F| multisets
    k = 64
    thetas, phis = midpoint_grid(k)
    rho = schmidt_pure_state(math.pi / 3)
    rotated = apply_local_unitary(rho, ROTATION, None)
    base = char_batch(rho, thetas, phis)
    moved_t = np.empty_like(thetas)
    moved_p = np.empty_like(phis)
    for g in range(thetas.shape[0]):
        ket = np.array([math.cos(thetas[g, 0]), math.sin(thetas[g, 0]) * np.exp(1j * phis[g, 0])])
        prm = params_from_ket(ROTATION @ ket)
        moved_t[g, 0] = prm.thetas[0]
        moved_p[g, 0] = prm.phis[0]
    transported = char_batch(rotated, moved_t, moved_p)
    quantile_dist = float(
        np.max(np.abs(np.sort(base.magnitude) - np.sort(transported.magnitude)))
    )
    # documentation: on the raw uniform grid the multisets differ because the
    # parameter-box measure is not rotation invariant
    uniform = char_batch(rotated, thetas, phis)
    artifact = float(np.max(np.abs(np.sort(base.magnitude) - np.sort(uniform.magnitude))))
    report(
        5,
        lu_ok and quantile_dist <= 1e-2 and artifact > 1e-2,
        "LU invariance on 20 pure pairs (worst margin "
        f"{worst:.2e}), rotated-surface multiset distance {quantile_dist:.2e} "
        f"(uniform-grid artifact {artifact:.2f}, documented)",
    )


def test_criterion_06_mixing_monotonicity():
    rng = np.random.default_rng(601)
    worst = -np.inf
    for _ in range(50):
        rho = random_density_matrix(4, rng, split=(2, 2))
        side = "A" if rng.integers(2) == 0 else "B"
        k = int(rng.integers(2, 5))
        weights = rng.dirichlet(np.ones(k))
        unitaries = [random_unitary(2, rng) for _ in range(k)]
        mixed = mix_local_unitaries(rho, weights, unitaries, side=side)
        g0 = strength(rho, FINE)
        g1 = strength(mixed, FINE)
        worst = max(worst, g1.value - g0.value - 2 * (g0.error_estimate + g1.error_estimate))
    print(
        "  note: the monotonicity is not exact under the flat parameter-box measure; "
        "~1.3% of instances genuinely violate it (pinned counterexample in "
        "tests/test_strength.py, gap +9.5e-3)"
    )
    report(6, worst <= 0.0, f"mixing never increases G on 50 instances, worst margin {worst:.2e}")


def test_criterion_07_productization_inequality():
    rng = np.random.default_rng(701)
    worst = -np.inf
    for _ in range(10):
        rho = random_density_matrix(4, rng, split=(2, 2))
        g0 = strength(rho, FINE)
        rank = int(np.sum(np.linalg.eigvalsh(rho.matrix) > 1e-10))
        for _ in range(10):
            m = int(rng.integers(rank, rank * rank + 1))
            dec = decomposition_from_isometry(rho, random_isometry(m, rank, rng))
            g1 = strength(productize(dec), FINE)
            worst = max(worst, g1.value - g0.value - 2 * (g0.error_estimate + g1.error_estimate))
    print(
        "  note: the sample below contains a genuine violation (state 9, draw 7: "
        "G(productization) exceeds G(source) by +3.11e-3, stable to grid 384 and "
        "2e6-sample MC).  The inequality is not a theorem under the flat "
        "parameter-box measure; this criterion is expected RED with the analysis "
        "recorded in the module tests and project notes"
    )
    report(7, worst <= 0.0, f"productization never beats source on 100 draws, worst margin {worst:.2e}")


def test_criterion_08_entanglement_anchors():
    worst_pure = 0.0
    budget_ok = True
    for alpha in (math.pi / 8, math.pi / 4):
        start = time.perf_counter()
        res = entanglement_E(schmidt_pure_state(alpha))
        budget_ok &= time.perf_counter() - start < 300.0
        worst_pure = max(worst_pure, abs(res.E - abs(math.sin(2 * alpha))))

    start = time.perf_counter()
    res_classical = entanglement_E(classical_mixture())
    budget_ok &= time.perf_counter() - start < 300.0

    plus = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    minus = np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2)
    bellmix = DensityMatrix(
        0.5 * (np.outer(plus, plus.conj()) + np.outer(minus, minus.conj())), split=(2, 2)
    )
    start = time.perf_counter()
    res_bell = entanglement_E(bellmix)
    budget_ok &= time.perf_counter() - start < 300.0

    report(
        8,
        worst_pure <= 2e-3 and res_classical.E <= 5e-3 and res_bell.E <= 5e-3 and budget_ok,
        f"E anchors: pure err {worst_pure:.2e}, classical {res_classical.E:.2e}, "
        f"bell mixture {res_bell.E:.2e}, all under budget",
    )


def test_criterion_09_tomography():
    start = time.perf_counter()
    rng = np.random.default_rng(901)
    worst_single = 0.0
    counts = {2: 17, 3: 17, 4: 16}
    for n, reps in counts.items():
        for _ in range(reps):
            rho = random_density_matrix(n, rng)
            rebuilt = reconstruct_state(oracle_from_state(rho), n)
            worst_single = max(worst_single, trace_norm(rebuilt.matrix - rho.matrix))
    worst_bi = 0.0
    for dims in ((2, 2), (2, 3)):
        for _ in range(10):
            rho = random_density_matrix(dims[0] * dims[1], rng, split=dims)
            rebuilt = reconstruct_bipartite(conditional_oracle_from_state(rho), *dims)
            worst_bi = max(worst_bi, trace_norm(rebuilt.matrix - rho.matrix))
    elapsed = time.perf_counter() - start
    report(
        9,
        worst_single <= 1e-8 and worst_bi <= 1e-8 and elapsed < 5.0,
        f"reconstruction errors: single {worst_single:.2e}, bipartite {worst_bi:.2e}, {elapsed:.2f}s",
    )


def _random_real_separable(rng) -> DensityMatrix:
    terms = int(rng.integers(2, 5))
    weights = rng.dirichlet(np.ones(terms))
    out = np.zeros((4, 4), dtype=complex)
    sx = np.array([[0, 1], [1, 0]])
    sz = np.diag([1.0, -1.0])
    for w in weights:
        r = math.sqrt(rng.uniform(0, 1))
        ang = rng.uniform(0, 2 * math.pi)
        ra = 0.5 * (np.eye(2) + r * math.cos(ang) * sx + r * math.sin(ang) * sz).astype(complex)
        rb = random_density_matrix(2, rng).matrix
        out += w * kron(ra, rb)
    return DensityMatrix(out, split=(2, 2))


def test_criterion_10_main_normal_separability():
    p0 = np.diag([1.0, 0.0]).astype(complex)
    plus = np.full((2, 2), 0.5, dtype=complex)
    example = DensityMatrix(0.5 * (kron(p0, p0) + kron(plus, plus)), split=(2, 2))
    v_example = main_normal_constancy(steering_surface(example, 33))
    entangled = main_normal_constancy(steering_surface(schmidt_pure_state(math.pi / 4), 33))

    rng = np.random.default_rng(1001)
    accepted = 0
    worst_dev = 0.0
    tries = 0
    while accepted < 20 and tries < 200:
        tries += 1
        rho = _random_real_separable(rng)
        verdict = main_normal_constancy(steering_surface(rho, 33))
        if verdict.verdict == "inconclusive":
            continue  # degenerate surface, excluded by construction
        accepted += 1
        worst_dev = max(worst_dev, verdict.max_normal_deviation)
    ok = (
        v_example.verdict == "separable-real"
        and v_example.max_normal_deviation <= 1e-6
        and entangled.verdict == "not-separable-real"
        and entangled.max_normal_deviation > 0.05
        and accepted == 20
        and worst_dev <= 1e-6
    )
    report(
        10,
        ok,
        f"verdicts: example dev {v_example.max_normal_deviation:.1e}, entangled dev "
        f"{entangled.max_normal_deviation:.2f}, 20 random real-separable max dev {worst_dev:.1e}",
    )


def test_criterion_11_polytope():
    ok = True
    details = []
    for m in (4, 8):
        rep = polytope_diagnostics(m, samples=10_000, seed=1100 + m)
        ok &= (
            rep.hull_vertex_count == m
            and rep.max_hull_violation <= 1e-9
            and float(np.max(rep.vertex_attainment)) <= 1e-6
        )
        details.append(
            f"m={m}: hull {rep.hull_vertex_count}, violation {rep.max_hull_violation:.1e}, "
            f"vertex miss {np.max(rep.vertex_attainment):.1e}"
        )
    report(11, ok, "; ".join(details))


def test_criterion_12_measure_plumbing():
    om2 = abs(omega_volume(2) - 2 * math.pi**2)
    om3 = abs(omega_volume(3) - 8 * math.pi**3)
    rng = np.random.default_rng(1201)
    worst_sigma = 0.0
    for _ in range(10):
        rho = random_density_matrix(4, rng, split=(2, 2))
        quad = strength(rho, FINE)
        mc = strength(rho, IntegratorConfig(mode="monte-carlo", samples=100_000, seed=1202))
        worst_sigma = max(worst_sigma, abs(quad.value - mc.value) / mc.error_estimate)
    report(
        12,
        om2 <= 1e-10 and om3 <= 1e-10 and worst_sigma <= 3.0,
        f"omega errors {om2:.1e}/{om3:.1e}, quadrature-vs-MC worst {worst_sigma:.2f} sigma",
    )


def test_criterion_13_classical_mixture_oracle():
    """Independent Monte-Carlo oracle for the classically correlated state.

    The integrand p|F| is derived by hand: the conditional Bloch vector is
    (0, 0, cos 2theta) with p = 1/2, the theta response ratio is |sin 2theta|
    and the phi response vanishes, so p|F| = |sin 2theta| / 2.  The hand
    integrand is itself validated pointwise against finite differences of
    explicitly constructed matrices before being trusted.
    """
    rho = classical_mixture()

    # pointwise finite-difference validation of the hand-derived integrand
    rng = np.random.default_rng(1301)
    h = 1e-6
    eye2 = np.eye(2)
    worst_fd = 0.0
    for _ in range(200):
        theta = rng.uniform(0.05, math.pi - 0.05)
        phi = rng.uniform(0.0, 2 * math.pi)
        if abs(math.sin(2 * theta)) < 1e-3:
            continue

        def proj(t, f):
            ket = np.array([math.cos(t), math.sin(t) * np.exp(1j * f)])
            return np.outer(ket, ket.conj())

        def cond(t, f):
            big = kron(proj(t, f), eye2) @ rho.matrix
            n_mat = big.reshape(2, 2, 2, 2)
            n_mat = n_mat[0, :, 0, :] + n_mat[1, :, 1, :]
            return n_mat / np.trace(n_mat).real

        f_comp = []
        for dt, df in ((h, 0.0), (0.0, h)):
            dc = cond(theta + dt, phi + df) - cond(theta - dt, phi - df)
            dm = proj(theta + dt, phi + df) - proj(theta - dt, phi - df)
            num = float(np.sum(np.abs(np.linalg.eigvalsh(dc))))
            den = float(np.sum(np.abs(np.linalg.eigvalsh(dm))))
            f_comp.append(num / den)
        p_f = 0.5 * math.hypot(*f_comp)
        worst_fd = max(worst_fd, abs(p_f - 0.5 * abs(math.sin(2 * theta))))
    assert worst_fd <= 1e-5, f"hand integrand disagrees with finite differences: {worst_fd:.2e}"

    # 1e6-sample Monte-Carlo of the validated integrand
    theta = np.random.default_rng(1302).uniform(0.0, math.pi, 1_000_000)
    samples = math.sqrt(2) * 0.5 * np.abs(np.sin(2 * theta))
    mc_value = float(samples.mean())
    mc_sigma = float(samples.std()) / math.sqrt(samples.size)

    quad = strength_directed(rho, "AB", FINE)
    deviation = abs(quad.value - mc_value)
    analytic = math.sqrt(2) / math.pi
    print(
        f"  note: G_AB(classical) = {quad.value:.6f}; independent MC {mc_value:.6f} "
        f"+/- {mc_sigma:.6f}; analytic sqrt(2)/pi = {analytic:.6f}; an often-quoted "
        f"value 1/2 differs by {abs(0.5 - analytic):.4f} and is NOT a target"
    )
    report(
        13,
        deviation <= 3 * mc_sigma + quad.error_estimate,
        f"classical-state quadrature within {deviation / mc_sigma:.2f} sigma of the "
        f"independent oracle (fd check {worst_fd:.1e})",
    )
