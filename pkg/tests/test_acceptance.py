"""Acceptance criteria 1-9, each at its stated tolerance.

Every test records a one-line verdict; the terminal summary prints them as
``criterion N: PASS|FAIL - detail``.
"""

import csv
import math
import time
from pathlib import Path

import numpy as np
import pytest

from qslkit import channels, closed_forms as cf, figures, validation
from qslkit.channels import ChannelConfig
from qslkit.hermitian import bures_fidelity, norms, purity, superfidelity_bound
from qslkit.nonmarkov import gamma_negative_intervals
from qslkit.speedlimit import QslRequest, qsl
from qslkit.statespec import parse_state
from qslkit.states import bloch_state, m_cl
from qslkit.witness import coherent_bell_witness, ghz_witness

OUN = ChannelConfig.oun(1.0, 0.1)
RTN = ChannelConfig.rtn(1.0, 0.6)
NMAD = ChannelConfig.nmad(1.0, 0.1)
REFERENCE = (OUN, RTN, NMAD)
GOLDEN = Path(__file__).parent / "golden" / "figures"

pytestmark = pytest.mark.slow


def _read(path):
    rows = list(csv.reader(Path(path).open()))
    return rows[0], np.array(rows[1:], dtype=float)


def _extrema(y, rel=1e-9):
    """Number of strict interior local extrema, ignoring wiggles below rel * scale."""
    d = np.diff(y)
    d = d[np.abs(d) > rel * max(np.max(np.abs(y)), 1e-300)]
    return int(np.count_nonzero(np.sign(d[1:]) != np.sign(d[:-1])))


@pytest.fixture(scope="module")
def figure_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("figures")
    timings = {}
    for fig_id in figures.figure_ids():
        t0 = time.perf_counter()
        figures.generate(fig_id, out)
        timings[fig_id] = time.perf_counter() - t0
    return out, timings


def test_criterion_1_closed_forms_match_pipeline(record):
    t0 = time.perf_counter()
    report = validation.closed_form_report()
    elapsed = time.perf_counter() - t0
    corrected = {name: dev for (name, variant), dev in report.items() if variant == "corrected"}
    bad = {n: d for n, d in corrected.items() if isinstance(d, str) or d > 1e-5}
    worst = max(d for d in corrected.values() if not isinstance(d, str))
    flagged = sorted(n for (n, v), d in report.items() if v == "printed" and (isinstance(d, str) or d > 1e-5))
    ok = len(corrected) == 8 and not bad and elapsed < 300
    record(1, ok, f"8 forms, worst relative deviation {worst:.1e} over kappa*tau in [0.05, 5], {elapsed:.1f}s; printed variants flagged: {len(flagged)}")
    assert ok, bad


def test_criterion_2_single_qubit_fidelity_equality(record):
    rng = np.random.default_rng(2)

    def ball():
        v = rng.normal(size=3)
        return v / np.linalg.norm(v) * rng.uniform() ** (1 / 3)

    worst = max(abs(superfidelity_bound(a, b) - bures_fidelity(a, b)) for a, b in ((bloch_state(ball()), bloch_state(ball())) for _ in range(1000)))
    ok = worst <= 1e-10
    record(2, ok, f"max |superfidelity - fidelity| = {worst:.1e} on 1000 qubit pairs")
    assert ok


def test_criterion_3_norm_hierarchy(record):
    bad = 0
    for op, hs, tr in validation.norm_triples(100, seed=3):
        bad += not (op >= hs * (1 - 1e-12) and hs >= tr * (1 - 1e-12))
    record(3, bad == 0, f"{bad} violations of OP >= HS >= TR in 100 random cases")
    assert bad == 0


def test_criterion_4_mcl_laws(record):
    ok_a, detail_a = validation.prop_mcl_bound([], samples=10_000)
    ok_b, detail_b = validation.prop_dephasing_mcl([])
    rng = np.random.default_rng(4)
    worst_c = 0.0
    ts = np.linspace(0, 25, 101)
    for _ in range(200):
        c, z = rng.uniform(-1, 1, 2)
        if c * c + z * z > 1:
            continue
        direct = m_cl(channels.evolve_many(cf.qubit_state(abs(c), z), NMAD, ts))
        worst_c = max(worst_c, float(np.max(np.abs(cf.mcl_closed_form("qubit-nmad", (abs(c), z), NMAD, ts) - direct))))
    ok = ok_a and ok_b and worst_c <= 1e-9
    record(4, ok, f"(a) {detail_a}; (b) {detail_b}; (c) damping closed form max deviation {worst_c:.1e}")
    assert ok


def test_criterion_5_non_markovian_signatures(record, figure_dir):
    out, _ = figure_dir
    counts = {cfg.kind: len(gamma_negative_intervals(cfg, 20.0)) for cfg in REFERENCE}
    ext_rp = _extrema(_read(out / "fig1a" / "nmad_chi+.csv")[1][:, 1])
    ext_bures = _extrema(_read(out / "fig1b" / "nmad_chi+.csv")[1][:, 1])
    ok = counts["rtn"] >= 1 and counts["nmad"] >= 1 and counts["oun"] == 0 and ext_rp >= 1 and ext_bures >= 1
    record(5, ok, f"negative-rate intervals {counts}; NMAD chi+ interior extrema: {ext_rp} (RP), {ext_bures} (Bures)")
    assert ok


def test_criterion_6_discrimination(record):
    xs = np.linspace(0.05, 20.0, 200)
    t0 = time.perf_counter()
    v3 = ghz_witness(3, NMAD, xs)
    v4 = ghz_witness(4, NMAD, xs)
    vm = coherent_bell_witness(NMAD, xs)
    elapsed = time.perf_counter() - t0

    def idx(v):
        return sorted(sorted(int(lab.split(",")[1][:-1]) for lab in g) for g in v.groups)

    p3, p4 = idx(v3), idx(v4)
    ok = (
        p3 == [[1], [2, 3, 4]]
        and p4 == [[1], [2, 3, 5, 8], [4, 6, 7]]
        and max(v3.intra_group_max_dev, v4.intra_group_max_dev) < 1e-8
        and min(v3.inter_group_min_gap, v4.inter_group_min_gap) > 1e-3
        and len(vm.groups) == 1
        and vm.intra_group_max_dev < 1e-8
        and elapsed < 600
    )
    record(
        6,
        ok,
        f"n=3 {p3}, n=4 {p4}, intra {max(v3.intra_group_max_dev, v4.intra_group_max_dev):.1e}, "
        f"gap {min(v3.inter_group_min_gap, v4.inter_group_min_gap):.3g}, coherent states in {len(vm.groups)} group, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_7_bound_validity(record, figure_dir):
    out, _ = figure_dir
    worst, count = 0.0, 0
    rng = np.random.default_rng(7)
    for _ in range(100):
        rho, cfg, tau = validation.random_case(rng)
        worst = max(worst, qsl(rho, cfg, QslRequest(method="bures", norm="op", tau=tau)).tau_qsl / tau)
        count += 1
    for fig_id in figures.figure_ids():
        fig = figures.get_figure(fig_id)
        if fig.request.method != "bures" or fig.request.norm != "op":
            continue
        for curve in fig.curves:
            data = _read(out / fig_id / f"{curve.id}.csv")[1]
            worst = max(worst, float(np.max(data[:, 1])) / fig.request.tau)
            count += len(data)
    ok = worst <= 1 + 1e-9
    record(7, ok, f"max tau_QSL / tau = {worst:.12f} over {count} Bures OP-norm evaluations")
    assert ok


def test_criterion_8_generator_consistency(record):
    rng = np.random.default_rng(8)
    worst, h = 0.0, 1e-6
    for cfg in REFERENCE:
        zeros = channels.p_zeros(cfg, 21.0)
        done = 0
        while done < 50:
            t = float(rng.uniform(0.1, 20.0))
            if any(abs(t - z) < 1e-3 for z in zeros):
                continue
            n = int(rng.integers(1, 4))
            rs = channels.evolve_many(validation.random_density(rng, 1 << n), cfg, [t - h, t, t + h])
            worst = max(worst, float(norms(channels.generator(rs[1], cfg, t) - (rs[2] - rs[0]) / (2 * h)).hs))
            done += 1
    kraus = max(channels.kraus_completeness_error(cfg, np.linspace(0, 20, 401)) for cfg in REFERENCE)
    ok = worst <= 1e-6 and kraus <= 1e-12
    record(8, ok, f"max ||L(rho_t) - finite difference||_hs = {worst:.1e} (150 times); Kraus completeness {kraus:.1e}")
    assert ok


def test_criterion_9_figure_reproduction(record, figure_dir):
    out, timings = figure_dir
    problems = []
    for fig_id in figures.figure_ids():
        fig = figures.get_figure(fig_id)
        for curve in fig.curves:
            header, data = _read(out / fig_id / f"{curve.id}.csv")
            gold_header, gold = _read(GOLDEN / fig_id / f"{curve.id}.csv")
            if header != gold_header or data.shape != gold.shape or not np.allclose(data, gold, rtol=1e-9, atol=1e-12):
                problems.append(f"{fig_id}/{curve.id} differs from golden")
            cl1, tq = data[:, 2], data[:, 1]
            if curve.channel.kind == "oun":
                # monotone decay: coherence never revives, the bound has no oscillation
                if np.any(np.diff(cl1) > 1e-12) or _extrema(tq) > 1:
                    problems.append(f"{fig_id}/{curve.id} not a monotone decay")
            if curve.channel.kind == "rtn":
                # coherence revives on every curve; the bound itself oscillates for pure
                # initial states (for the half-mixed coherent state the second coherence
                # bump is too small to turn the bound around at figure resolution)
                if not np.any(np.diff(cl1) > 1e-6):
                    problems.append(f"{fig_id}/{curve.id} lacks coherence revivals")
                if purity(parse_state(curve.state)) > 1 - 1e-12 and _extrema(tq) < 2:
                    problems.append(f"{fig_id}/{curve.id} bound does not oscillate")

    def family(fig_id, labels):
        curves = {lab: _read(out / fig_id / f"nmad_{lab}.csv")[1][:, 1] for lab in labels}
        from qslkit.witness import group_curves

        return group_curves(curves)

    g3a, _, gap3a = family("fig3a", ["phi+", "phi-", "psi+", "psi-"])
    if sorted(map(sorted, g3a)) != [["phi+", "phi-"], ["psi+", "psi-"]] or not gap3a > 1e-3:
        problems.append(f"fig3a Bell families {g3a}")
    for fig_id in ("fig3b", "fig5"):
        g, intra, _ = family(fig_id, ["mcb_phi+", "mcb_phi-", "mcb_psi+", "mcb_psi-"])
        if len(g) != 1:
            problems.append(f"{fig_id} coherent family split into {g}")
    slowest = max(timings, key=timings.get)
    if timings[slowest] >= 60:
        problems.append(f"{slowest} took {timings[slowest]:.0f}s")
    ok = not problems
    detail = "13 figures match golden CSVs and expected curve features" if ok else "; ".join(problems)
    record(9, ok, f"{detail}; slowest {slowest} {timings[slowest]:.1f}s")
    assert ok, problems
