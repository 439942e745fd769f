import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from fairpost.data import TabularDataset
from fairpost.metrics import (
    detector_ground_truth,
    disparate_impact,
    individual_bias_score,
    individual_bias_summary,
)
from fairpost.models import LogisticModel, model_to_dict, train_logistic
from fairpost.postprocess import (
    THETA_GRID,
    ConstantDetector,
    EopState,
    FitError,
    IgdState,
    RocState,
    eop_apply,
    eop_expected_rates,
    eop_fit,
    eop_problem,
    fit_postprocessor,
    igd_apply,
    igd_fit,
    keyed_uniform,
    load_postprocessor,
    roc_apply,
    roc_decisions,
    roc_fit,
    save_postprocessor,
    select_tau,
    solve_eop_lp,
)
from fairpost.postprocess.tau import di_band

from conftest import TableModel, make_synthetic


def table_dataset(table, d, y=None):
    n = len(d)
    X = np.arange(n, dtype=float)[:, None]
    y = np.zeros(n, dtype=int) if y is None else np.asarray(y)
    return TableModel(table), TabularDataset(X, np.asarray(d), y, ("id",))


# --- select_tau -----------------------------------------------------------


def test_select_tau_worked_case():
    res = select_tau(
        bias_scores=[0.4, 0.3, 0.1, -0.05],
        base_decisions=[0, 0, 0, 1, 1, 1, 1, 0],
        counterfactual_decisions=[1, 1, 1, 1],
        protected=[0, 0, 0, 0, 1, 1, 1, 1],
        epsilon=0.2,
    )
    assert res.k == 2
    assert res.beta.tolist() == [1, 1, 0, 0]
    assert res.tau == pytest.approx(0.2, abs=1e-15)
    assert np.allclose(res.di_path[:3], [1 / 3, 2 / 3, 1.0])
    assert res.constraint_met


def test_select_tau_already_in_band():
    res = select_tau([0.3, 0.2], [1, 0, 1, 0], [1, 1], [0, 0, 1, 1], 0.2)
    assert res.k == 0
    assert not res.beta.any()
    assert res.tau > 0.3


def test_select_tau_center_target():
    # DI path 0.8, 0.9, 1.0, 1.0, ...: smallest stops at k=0, center goes to k=2
    scores = np.linspace(0.9, 0.0, 10)
    base = [0, 0] + [1] * 8 + [1] * 10
    args = (scores, base, [1] * 10, [0] * 10 + [1] * 10, 0.2)
    assert select_tau(*args).k == 0
    assert select_tau(*args, target="center").k == 2


def test_select_tau_unreachable_is_flagged():
    res = select_tau([0.2, 0.1], [0, 0, 1, 1], [0, 1], [0, 0, 1, 1], 0.2)
    assert not res.constraint_met
    assert res.k == 2
    assert res.achieved_di == 0.5


def test_select_tau_errors():
    with pytest.raises(FitError):
        select_tau([], [1, 1], [], [1, 1], 0.2)
    with pytest.raises(FitError, match="undefined"):
        select_tau([0.1], [1, 0], [1], [0, 1], 0.2)
    with pytest.raises(ValueError):
        di_band(0.0)


@st.composite
def tau_problems(draw):
    m = draw(st.integers(1, 25))
    n1 = draw(st.integers(1, 25))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    # scores at d=0 and d=1 drawn on a coarse grid so ties happen
    s0 = rng.integers(0, 11, m) / 10
    s1 = rng.integers(0, 11, m) / 10
    priv = rng.integers(0, 2, n1)
    priv[0] = 1
    d = np.r_[np.zeros(m, int), np.ones(n1, int)]
    base = np.r_[(s0 >= 0.5).astype(int), priv]
    eps = draw(st.sampled_from([0.05, 0.2, 0.5, 0.9]))
    return s1 - s0, base, (s1 >= 0.5).astype(int), d, eps


def brute_force_tau(scores, base, cf, d, eps):
    """Simulate every flip count on explicit decision vectors."""
    m = scores.size
    order = sorted(range(m), key=lambda i: (-scores[i], i))
    lo, hi = di_band(eps)
    path = []
    for k in range(m + 1):
        y = base.copy()
        unpriv_pos = np.flatnonzero(d == 0)
        for i in order[:k]:
            y[unpriv_pos[i]] = cf[i]
        path.append(disparate_impact(y, d))
    ok = [lo - 1e-12 <= v <= hi + 1e-12 for v in path]
    if any(ok):
        return ok.index(True), path
    if any(v <= hi for v in path):
        best = max((v, -k) for k, v in enumerate(path) if v <= hi)
        return -best[1], path
    return path.index(min(path)), path


@given(tau_problems())
@settings(max_examples=150, deadline=None)
def test_select_tau_matches_brute_force(problem):
    scores, base, cf, d, eps = problem
    res = select_tau(scores, base, cf, d, eps)
    k, path = brute_force_tau(scores, base, cf, d, eps)
    assert res.k == k
    assert np.allclose(res.di_path, path, rtol=0, atol=1e-12)
    assert res.beta.sum() == k


@given(tau_problems())
@settings(max_examples=150, deadline=None)
def test_select_tau_monotone_prefix(problem):
    scores, base, cf, d, eps = problem
    res = select_tau(scores, base, cf, d, eps)
    n_nonneg = int((scores >= 0).sum())
    prefix = res.di_path[: n_nonneg + 1]
    assert np.all(np.diff(prefix) >= -1e-15)


@given(tau_problems())
@settings(max_examples=150, deadline=None)
def test_select_tau_threshold_reproduces_beta(problem):
    scores, base, cf, d, eps = problem
    res = select_tau(scores, base, cf, d, eps)
    above, below = scores > res.tau, scores < res.tau
    assert np.all(res.beta[above] == 1)
    assert np.all(res.beta[below] == 0)
    tied = np.flatnonzero(~above & ~below)
    if tied.size:
        # rows sitting exactly on tau are filled in index order
        chosen = res.beta[tied]
        assert np.all(np.diff(chosen) <= 0)
    else:
        assert np.array_equal(res.beta, above.astype(int))


# --- IGD ------------------------------------------------------------------


def straddle_model_and_data(n=241):
    # z = x + 4 d - 2; unprivileged rows straddle 0.5 exactly when -2 <= x < 2
    model = LogisticModel(np.array([1.0, 4.0]), -2.0)
    xu = np.linspace(-6.0, 6.0, n) + 0.013
    X = np.r_[xu, np.full(n // 2, 5.0)][:, None]
    d = np.r_[np.zeros(n, int), np.ones(n // 2, int)]
    return model, TabularDataset(X, d, np.zeros(d.size, int), ("x",)), xu


def test_beta_identifies_straddlers():
    model, ds, xu = straddle_model_and_data()
    straddle = (xu >= -2) & (xu < 2)
    # the DI closest to 1 is first reached once every straddler has flipped
    beta = detector_ground_truth(model, ds, 0.4, target="center")
    assert np.array_equal(beta, straddle.astype(int))


def test_igd_apply_examples():
    # row 0: labels 0 at d=0 and 1 at d=1; row 1: labels 0 at both
    base = TableModel([[0.3, 0.7], [0.1, 0.2]])
    X = np.array([[0.0], [1.0]])
    fires = IgdState(ConstantDetector(1), 0.0, 1, 0.2)
    silent = IgdState(ConstantDetector(0), 1.0, 0, 0.2)
    assert igd_apply(fires, base, X, 0).tolist() == [1, 0]
    assert igd_apply(silent, base, X, 0).tolist() == [0, 0]
    assert igd_apply(fires, base, X, 1).tolist() == [1, 0]


def test_zero_protected_weight_is_identity():
    ds = make_synthetic(n=300, seed=2)
    m = LogisticModel(np.array([1.0, 0.5, -0.3, 0.0]), 0.1)
    state = igd_fit(m, ds)
    assert state.flip_count_val == 0
    assert isinstance(state.detector, ConstantDetector) and state.detector.value == 0
    assert state.warnings
    out = igd_apply(state, m, ds.features, ds.protected)
    assert np.array_equal(out, m.label(ds.features, ds.protected))


@pytest.fixture(scope="module")
def fitted():
    train = make_synthetic(n=600, seed=10, bias=2.5)
    val = make_synthetic(n=400, seed=11, bias=2.5)
    test = make_synthetic(n=400, seed=12, bias=2.5)
    base = train_logistic(train)
    return base, val, test


def test_igd_privileged_invariance(fitted):
    base, val, test = fitted
    state = igd_fit(base, val)
    assert state.flip_count_val > 0
    out = igd_apply(state, base, test.features, 1)
    assert np.array_equal(out, base.label(test.features, 1))


@given(w=st.lists(st.floats(-5, 5), min_size=3, max_size=3), b=st.floats(-3, 3))
@settings(max_examples=60, deadline=None)
def test_igd_dominance_for_any_detector(fitted, w, b):
    base, _, test = fitted
    detector = LogisticModel(np.array(w[:3]), b, protected_input=False)
    pipe = fit_postprocessor("orig", base, None)
    igd = type(pipe)("igd", base, IgdState(detector, 0.0, 1, 0.2))
    assert (individual_bias_summary(igd, test.features)
            <= individual_bias_summary(pipe, test.features))


def test_igd_never_reads_labels(fitted):
    base, val, _ = fitted
    scrambled = TabularDataset(val.features, val.protected, 1 - val.labels, val.feature_names)
    a, b = igd_fit(base, val), igd_fit(base, scrambled)
    assert np.array_equal(a.detector.weights, b.detector.weights)
    assert a.tau == b.tau


def test_igd_improves_di_on_validation(fitted):
    base, val, _ = fitted
    before = disparate_impact(base.label(val.features, val.protected), val.protected)
    state = igd_fit(base, val)
    assert state.constraint_met
    assert abs(state.validation_di - 1) < abs(before - 1)


# --- ROC ------------------------------------------------------------------


def test_roc_decisions_examples():
    assert roc_decisions([0.45], 0, 0.1).tolist() == [1]
    assert roc_decisions([0.45], 1, 0.1).tolist() == [0]
    for theta in (0.05, 0.1, 0.25, 0.295):
        assert roc_decisions([0.8, 0.8], [0, 1], theta).tolist() == [1, 1]


def test_roc_fit_already_in_band():
    base, ds = table_dataset([[0.7, 0.0]] * 2 + [[0.0, 0.7]] * 2, [0, 0, 1, 1])
    assert roc_fit(base, ds).theta == 0.005


def test_roc_fit_constructed_case():
    # four unprivileged rows at 0.463 enter the band once theta > 0.037
    table = [[0.463, 0]] * 4 + [[0.2, 0]] + [[0, 0.9]] * 5
    base, ds = table_dataset(table, [0] * 5 + [1] * 5)
    state = roc_fit(base, ds, 0.2)
    assert state.theta == 0.04
    assert state.validation_di == pytest.approx(0.8)
    assert state.constraint_met


def grid_oracle(scores, d, eps, grid):
    lo, hi = di_band(eps)
    best = None
    for theta in grid:
        y = np.empty(len(scores), dtype=int)
        for i, (s, g) in enumerate(zip(scores, d)):
            y[i] = (1 - g) if abs(s - 0.5) < theta else int(s >= 0.5)
        di = disparate_impact(y, d)
        if di is not None and lo - 1e-12 <= di <= hi + 1e-12:
            return theta
        if di is not None and (best is None or abs(di - 1) < best[0]):
            best = (abs(di - 1), theta)
    return best[1]


@given(seed=st.integers(0, 10_000), eps=st.sampled_from([0.1, 0.2, 0.4]))
@settings(max_examples=40, deadline=None)
def test_roc_fit_matches_grid_oracle(seed, eps):
    rng = np.random.default_rng(seed)
    n = 30
    d = np.r_[np.zeros(15, int), np.ones(15, int)]
    s = np.clip(rng.normal(0.5 + 0.15 * d, 0.2), 0, 1)
    table = np.zeros((n, 2))
    table[np.arange(n), d] = s
    base, ds = table_dataset(table, d)
    # always keep one privileged row firmly favorable so DI stays defined
    table[n - 1, 1] = 1.0
    s[n - 1] = 1.0
    assert roc_fit(base, ds, eps).theta == grid_oracle(s, d, eps, THETA_GRID)


@given(s=st.floats(0, 1), d=st.integers(0, 1), theta=st.sampled_from(list(THETA_GRID)))
def test_roc_band_properties(s, d, theta):
    out = roc_decisions([s], d, theta)[0]
    if abs(s - 0.5) < theta:
        assert out == 1 - d
    else:
        assert out == int(s >= 0.5)


def test_roc_state_validates_theta():
    with pytest.raises(ValueError):
        RocState(0.5, 0.2)


def test_roc_apply_uses_scores(fitted):
    base, val, test = fitted
    state = roc_fit(base, val)
    out = roc_apply(state, base, test.features, test.protected)
    s = base.score(test.features, test.protected)
    outside = np.abs(s - 0.5) >= state.theta
    assert np.array_equal(out[outside], (s[outside] >= 0.5).astype(int))


# --- EOP ------------------------------------------------------------------


def eop_counts(tpr0, fpr0, tpr1, fpr1, pos=10, neg=10):
    c = np.zeros((2, 2, 2), dtype=int)
    for g, (tpr, fpr) in enumerate(((tpr0, fpr0), (tpr1, fpr1))):
        c[g, 1, 1] = round(tpr * pos)
        c[g, 0, 1] = pos - c[g, 1, 1]
        c[g, 1, 0] = round(fpr * neg)
        c[g, 0, 0] = neg - c[g, 1, 0]
    return c


def counts_to_dataset(c):
    table, d, y = [], [], []
    for g in (0, 1):
        for yh in (0, 1):
            for yy in (0, 1):
                for _ in range(c[g, yh, yy]):
                    row = [0.0, 0.0]
                    row[g] = 0.9 if yh else 0.1
                    table.append(row)
                    d.append(g)
                    y.append(yy)
    return table_dataset(table, d, y)


def test_eop_identity_when_already_equal():
    c = eop_counts(0.7, 0.2, 0.7, 0.2)
    A, cost = eop_problem(c)
    p = solve_eop_lp(A, cost)
    assert np.allclose(p, [0, 1, 0, 1])


def test_eop_constructed_rates_equalized():
    c = eop_counts(0.6, 0.2, 0.8, 0.4)
    base, ds = counts_to_dataset(c)
    state = eop_fit(base, ds)
    assert np.array_equal(state.cell_counts, c)
    rates = eop_expected_rates(state)
    assert abs(rates[0, 0] - rates[1, 0]) <= 1e-9
    assert abs(rates[0, 1] - rates[1, 1]) <= 1e-9


def test_eop_matches_scipy_linprog():
    for rates in ((0.6, 0.2, 0.8, 0.4), (0.9, 0.5, 0.4, 0.1), (0.3, 0.3, 0.7, 0.2)):
        A, cost = eop_problem(eop_counts(*rates))
        p = solve_eop_lp(A, cost)
        ref = linprog(cost, A_eq=A, b_eq=np.zeros(2), bounds=[(0, 1)] * 4, method="highs")
        assert ref.status == 0
        assert cost @ p == pytest.approx(ref.fun, abs=1e-9)
        assert np.max(np.abs(A @ p)) <= 1e-12


def test_eop_optimum_not_beaten_by_grid():
    A, cost = eop_problem(eop_counts(0.6, 0.2, 0.8, 0.4))
    opt = cost @ solve_eop_lp(A, cost)
    grid = np.linspace(0, 1, 101)
    best = np.inf
    for p00 in grid:
        for p01 in grid:
            # the two equalities fix group 1's probabilities
            sol = np.linalg.solve(A[:, 2:], -A[:, :2] @ [p00, p01])
            if np.all(sol >= -1e-12) and np.all(sol <= 1 + 1e-12):
                best = min(best, cost @ np.r_[p00, p01, sol])
    assert opt <= best + 1e-9


def test_eop_identical_groups_symmetric():
    c = eop_counts(0.6, 0.3, 0.6, 0.3)
    base, ds = counts_to_dataset(c)
    p = eop_fit(base, ds).flip_probs
    assert np.array_equal(p[0], p[1])


def test_eop_degenerate_group():
    c = eop_counts(0.6, 0.3, 0.6, 0.3)
    c[1, :, 1] = 0
    with pytest.raises(FitError, match="truth classes"):
        eop_problem(c)


def test_keyed_uniform_determinism():
    a = keyed_uniform(3, [10, 11, 12], 0)
    assert np.array_equal(a, keyed_uniform(3, [12, 11, 10], 0)[::-1])
    assert not np.array_equal(a, keyed_uniform(3, [10, 11, 12], 1))
    assert not np.array_equal(a, keyed_uniform(4, [10, 11, 12], 0))
    assert np.all((a >= 0) & (a < 1))


def test_eop_apply_reproducible_and_order_free(fitted):
    base, val, test = fitted
    state = eop_fit(base, val, seed=5)
    idx = np.arange(len(test)) + 1000
    out = eop_apply(state, base, test.features, test.protected, idx)
    perm = np.random.default_rng(0).permutation(len(test))
    again = eop_apply(state, base, test.features[perm], test.protected[perm], idx[perm])
    assert np.array_equal(out[perm], again)


def test_eop_apply_sample_rates_near_probs():
    state = EopState(np.array([[0.25, 0.75], [0.1, 0.9]]), 7, np.ones((2, 2, 2)))
    base = TableModel([[0.9, 0.9]])
    X = np.zeros((20000, 1))
    out = eop_apply(state, base, X, 0, np.arange(20000))
    assert abs(out.mean() - 0.75) < 0.02


# --- pipeline -------------------------------------------------------------


@pytest.mark.parametrize("method", ["orig", "igd", "roc", "eop"])
def test_persistence_round_trip(method, fitted, tmp_path):
    base, val, test = fitted
    pipe = fit_postprocessor(method, base, val, seed=3)
    save_postprocessor(pipe, tmp_path / "p.json")
    back = load_postprocessor(tmp_path / "p.json", base)
    idx = np.arange(len(test))
    assert np.array_equal(pipe.decide(test.features, test.protected, idx),
                          back.decide(test.features, test.protected, idx))
    assert json.loads((tmp_path / "p.json").read_text())["schema_version"] == 1


@pytest.mark.parametrize("method", ["igd", "roc", "eop"])
def test_fit_leaves_base_untouched(method, fitted):
    base, val, _ = fitted
    before = json.dumps(model_to_dict(base))
    fit_postprocessor(method, base, val)
    assert json.dumps(model_to_dict(base)) == before


def test_unknown_method(fitted):
    base, val, _ = fitted
    with pytest.raises(ValueError, match="unknown method"):
        fit_postprocessor("lfr", base, val)


def test_bias_score_drives_beta_order(fitted):
    base, val, _ = fitted
    unpriv = val.protected == 0
    scores = individual_bias_score(base, val.features[unpriv])
    state = igd_fit(base, val)
    res = select_tau(scores, base.label(val.features, val.protected),
                     base.label(val.features[unpriv], 1), val.protected, 0.2)
    assert state.tau == res.tau
    assert np.all(scores[res.beta == 1] > res.tau)
