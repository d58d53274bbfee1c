"""Acceptance suite: ten end-to-end checks of the refrigerator library.

Each test prints a single uncaptured verdict line so the run log shows one
pass/fail line per numbered check.  Checks 2 to 4 share one batch of 200
random parameter draws, solved once and cached.
"""

import functools
import time

import numpy as np
import pytest

from thermoq import (
    BathTriple,
    CouplingRates,
    FridgeSpec,
    carnot_e2,
    carnot_product_state,
    compare_closed_form,
    evolve,
    fridge_bosonic_generator,
    fridge_generator,
    fridge_h0,
    gibbs_state,
    heat_currents,
    ketbra,
    optimize_e2,
    q_c_closed_form,
    q_c_hot_limit,
    random_comparison_search,
    random_parameters,
    resolve_config,
    scan_optimal_e2,
    stationarity_residual,
    steady_state,
    time_averaged_map,
    trace_distance,
    virtual_beta,
)

from conftest import (
    CASE,
    CASE_BATHS,
    CASE_RATES,
    CASE_SPEC,
    quadrature_collision_map,
    random_density,
)


def verdict(capsys, number, name, ok, note=""):
    line = f"acceptance {number:02d} {name}: {'PASS' if ok else 'FAIL'}"
    if note:
        line += f"  ({note})"
    with capsys.disabled():
        print(line, flush=True)


@functools.lru_cache(maxsize=1)
def solved_draws():
    """200 random valid operating points with their steady-state reports."""
    rng = np.random.default_rng(0)
    out = []
    for _ in range(200):
        spec, baths, rates = random_parameters(rng)
        gen = fridge_generator(spec, baths, rates)
        out.append((spec, baths, rates, gen, steady_state(gen)))
    return out


def test_c01_equilibrium_gibbs(capsys):
    """Equal bath temperatures thermalize both models to the Gibbs state."""
    t0 = time.monotonic()
    for temp in (0.7, 1.3):
        baths = BathTriple(temp, temp, temp)
        target = gibbs_state(fridge_h0(CASE_SPEC), 1.0 / temp)
        for gen in (
            fridge_generator(CASE_SPEC, baths, CASE_RATES),
            fridge_bosonic_generator(CASE_SPEC, baths, CASE_RATES),
        ):
            rho = gen.stationary_state()
            assert trace_distance(rho, target) < 1e-12
            for q in heat_currents(gen, rho).values():
                assert abs(q) < 1e-10
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    verdict(capsys, 1, "equilibrium-oracle", True, f"{elapsed:.2f}s")


def test_c02_steady_state_soundness(capsys):
    t0 = time.monotonic()
    reports = solved_draws()
    assert len(reports) == 200
    for spec, baths, rates, gen, rep in reports:
        assert stationarity_residual(gen, rep.rho) < 1e-10
        off = rep.rho - np.diag(np.diag(rep.rho))
        assert np.abs(off).max() < 1e-10
        assert abs(rep.q_c + rep.q_h - rep.q_r) < 1e-10
        assert rep.entropy_production >= -1e-12
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0
    verdict(capsys, 2, "steady-state-soundness", True, f"200 draws, {elapsed:.2f}s")


def test_c03_cooling_condition_sign(capsys):
    """sign(r1 - r_c) follows sign(beta_V - beta_c) and ignores couplings."""
    checked = 0
    for spec, baths, rates, gen, rep in solved_draws():
        gap = virtual_beta(spec, baths) - baths.beta_c
        if abs(gap) < 1e-10 or abs(rep.r1 - rep.r_c) < 1e-10:
            continue  # too close to the reversible boundary to carry a sign
        assert np.sign(rep.r1 - rep.r_c) == np.sign(gap)
        checked += 1
    # coupling independence: rescale rates by 100 up or down and re-solve
    rng = np.random.default_rng(103)
    flips = 0
    base = solved_draws()
    while flips < 50:
        spec, baths, rates, gen, rep = base[int(rng.integers(len(base)))]
        gap = virtual_beta(spec, baths) - baths.beta_c
        if abs(gap) < 1e-10:
            continue
        factors = rng.choice([0.01, 1.0, 100.0], size=3)
        scaled = CouplingRates(
            rates.p_c * factors[0], rates.p_r * factors[1], rates.p_h * factors[2]
        )
        rep2 = steady_state(fridge_generator(spec, baths, scaled))
        if abs(rep2.r1 - rep2.r_c) < 1e-10:
            continue
        assert np.sign(rep2.r1 - rep2.r_c) == np.sign(gap)
        flips += 1
    assert checked >= 150
    verdict(
        capsys, 3, "cooling-condition-sign", True,
        f"{checked} base draws, {flips} coupling flips",
    )


def test_c04_efficiency_identity(capsys):
    qualifying = 0
    for spec, baths, rates, gen, rep in solved_draws():
        if rep.q_h <= 1e-12:
            continue
        target = 2 * spec.e1 / (spec.e2 - spec.e1)
        assert abs(rep.q_c / rep.q_h - target) < 1e-8
        assert rep.q_c / rep.q_h < rep.eta_carnot
        qualifying += 1
    assert qualifying > 20
    verdict(capsys, 4, "efficiency-identity", True, f"{qualifying} cooling draws")


def test_c05_carnot_point(capsys):
    e2_star = carnot_e2(CASE_SPEC.e1, CASE_BATHS)
    assert abs(e2_star - CASE["e2_carnot"]) < 1e-12
    spec = FridgeSpec(CASE_SPEC.e1, e2_star)
    # the located point actually closes the window
    assert abs(virtual_beta(spec, CASE_BATHS) - CASE_BATHS.beta_c) < 1e-12
    gen = fridge_generator(spec, CASE_BATHS, CASE_RATES)
    rho = gen.stationary_state()
    product = carnot_product_state(spec, CASE_BATHS)
    td = trace_distance(rho, product)
    assert td < 1e-9
    currents = heat_currents(gen, rho)
    assert max(abs(q) for q in currents.values()) < 1e-9
    verdict(
        capsys, 5, "carnot-point", True,
        f"E2*={e2_star:.10f}, d={td:.1e}",
    )


def test_c06_hot_limit_saturation(capsys):
    limit = q_c_hot_limit(CASE_SPEC, CASE_BATHS, CASE_RATES)
    hot = BathTriple(CASE_BATHS.t_c, CASE_BATHS.t_r, 1e6)
    gen = fridge_generator(CASE_SPEC, hot, CASE_RATES)
    q_solver = heat_currents(gen, gen.stationary_state())["c"]
    rel = abs(q_solver - limit) / abs(limit)
    assert rel < 1e-4
    # saturation from below: cooling power never decreases with T_h
    th_grid = np.geomspace(1.2, 1e4, 50)
    values = []
    for th in th_grid:
        baths = BathTriple(CASE_BATHS.t_c, CASE_BATHS.t_r, float(th))
        g = fridge_generator(CASE_SPEC, baths, CASE_RATES)
        values.append(heat_currents(g, g.stationary_state())["c"])
    diffs = np.diff(values)
    assert (diffs >= -1e-14).all()
    assert values[-1] <= limit + 1e-12
    verdict(
        capsys, 6, "hot-limit-saturation", True,
        f"rel={rel:.1e}, 50-point sweep monotone",
    )


def test_c07_interior_optimum(capsys):
    t0 = time.monotonic()
    cfg = resolve_config()
    # dense closed-form grid as the independent route
    grid = np.linspace(CASE_SPEC.e1 * (1 + 1e-9), 12.0, 10_000)
    values = np.array(
        [q_c_closed_form(FridgeSpec(1.0, float(e2)), CASE_BATHS, CASE_RATES) for e2 in grid]
    )
    k = int(values.argmax())
    assert 0 < k < len(grid) - 1
    # single peak: the finite differences change sign exactly once
    d = np.diff(values)
    signs = np.sign(d[np.abs(d) > 1e-15])
    changes = int((signs[1:] != signs[:-1]).sum())
    assert changes == 1
    res = optimize_e2(cfg)
    spacing = grid[1] - grid[0]
    assert abs(res.e2_opt - grid[k]) <= spacing
    # the optimum stays interior for hot temperatures up to 1e3
    scan = scan_optimal_e2(cfg, np.array([5.0, 20.0, 100.0, 1000.0]))
    for row in scan:
        assert np.isfinite(row["e2_opt"])
        assert CASE_SPEC.e1 < row["e2_opt"] < 12.0
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0
    verdict(
        capsys, 7, "interior-optimum", True,
        f"E2_opt={res.e2_opt:.4f}, grid agrees, {elapsed:.1f}s",
    )


def test_c08_model_equivalence(capsys):
    rng = np.random.default_rng(8)
    for _ in range(100):
        spec, baths, rates = random_parameters(rng)
        rho_c = fridge_generator(spec, baths, rates).stationary_state()
        rho_b = fridge_bosonic_generator(spec, baths, rates).stationary_state()
        assert np.abs(rho_c - rho_b).max() < 1e-10
    verdict(capsys, 8, "model-equivalence", True, "100 draws entrywise")


def test_c09_comparison_regimes(capsys):
    # a randomized search must locate at least one qutrit win
    search = random_comparison_search(draws=200, seed=0)
    assert search.qutrit_wins >= 1
    assert search.example_qutrit_win is not None
    # two-qubit dominance over the case-study hot sweep, uniform convention
    th_grid = np.geomspace(1.5, 100.0, 25)
    gaps = []
    for th in th_grid:
        baths = BathTriple(1.0, 1.1, float(th))
        rep = compare_closed_form(CASE_SPEC, baths, CASE_RATES)
        gaps.append((float(th), rep.q_c_pair, rep.q_c_qutrit))
    losses = [(th, qp, qq) for th, qp, qq in gaps if qp <= qq]
    ok = not losses
    note = (
        f"search {search.qutrit_wins} qutrit wins; pair trails qutrit at "
        f"{len(losses)}/25 sweep points"
    )
    verdict(capsys, 9, "comparison-regimes", ok, note)
    if losses:
        th, qp, qq = min(losses, key=lambda g: g[0])
        pytest.fail(
            "two-qubit cooling power does not exceed the qutrit value across "
            f"the hot-temperature sweep: at T_h={th:.3g} the pair gives "
            f"Q_c={qp:.6e} against the qutrit's {qq:.6e} (ratio {qp / qq:.3f}), "
            f"and the pair trails at all {len(losses)} of 25 sweep points under "
            "a uniform rate convention for both machines. The randomized-search "
            "half of this check passed. The deep-cold regime where the pair "
            "does win (for example t_c=1/3, t_r=0.35, t_h=20) is covered in "
            "test_qutrit.py::test_two_qubit_win_regime."
        )


def test_c10_dynamics_convergence(capsys):
    cfg_gen = fridge_generator(CASE_SPEC, CASE_BATHS, CASE_RATES)
    rho_s = cfg_gen.stationary_state()
    traj = evolve(cfg_gen, ketbra(4, 0, 0), 100.0, samples=5)
    td = trace_distance(traj.final, rho_s)
    assert td < 1e-8
    # collision channel: trace preserving, positive, swap-rate independent
    rng = np.random.default_rng(10)
    ias = cfg_gen.interactions
    for i in range(100):
        rho = random_density(4, rng)
        ia = ias[i % len(ias)]
        closed = time_averaged_map(ia, ia.ancilla_state(), rho)
        assert abs(np.trace(closed).real - 1.0) < 1e-12
        assert np.abs(closed - closed.conj().T).max() < 1e-12
        assert np.linalg.eigvalsh(closed).min() > -1e-10
        for g in (1.0, 9.0):
            quad = quadrature_collision_map(ia, 4, rho, g=g)
            assert np.abs(closed - quad).max() < 1e-10
    verdict(
        capsys, 10, "dynamics-convergence", True,
        f"final distance {td:.1e}, channel g-independent on 100 states",
    )
