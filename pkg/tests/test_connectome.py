import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geocongruence.connectome import (
    SubjectNetwork, analyze_subject, group_compare, load_manifest, reverse_weights,
    subject_gc, write_synthetic_cohort,
)
from geocongruence.errors import DataError, DomainError
from geocongruence.metrics import Reference, gc
from geocongruence.paths import giant_component, pair_records


def ring(strengths):
    n = len(strengths)
    w = np.zeros((n, n))
    for i, s in enumerate(strengths):
        j = (i + 1) % n
        w[i, j] = w[j, i] = s
    return w


def test_reverse_weights_values():
    w = np.array([[0, 0, 1], [0, 0, 9], [1, 9, 0]], dtype=float)
    present = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=bool)
    g = reverse_weights(w, presence=present)
    assert g.weights[0, 1] == 1.0
    assert g.weights[0, 2] == 0.5
    assert g.weights[1, 2] == pytest.approx(0.1)
    assert not reverse_weights(w).adjacency[0, 1]


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_reverse_weights_monotone(a, b):
    w = np.array([[0, a, b], [a, 0, 0], [b, 0, 0]])
    g = reverse_weights(w, presence=np.ones((3, 3), dtype=bool))
    if a < b:
        assert g.weights[0, 1] >= g.weights[0, 2]
    assert 0 < g.weights[0, 1] <= 1


def test_negative_strength_rejected():
    with pytest.raises(DataError):
        reverse_weights(np.array([[0, -1], [-1, 0]]))
    with pytest.raises(DataError):
        SubjectNetwork("s", np.array([[0, -1.0], [-1.0, 0]]))


def test_asymmetric_and_nonsquare_rejected():
    with pytest.raises(DataError):
        SubjectNetwork("s", np.array([[0, 1.0], [2.0, 0]]))
    with pytest.raises(DataError):
        SubjectNetwork("s", np.zeros((2, 3)))


def test_six_node_ring():
    # distance-2 pairs have a unique TSP that is also the GSP; each distance-3
    # pair has two TSPs with mean projection 1.025 and GSPs 0.95, 0.95, 0.8
    subject = SubjectNetwork("ring", ring([1, 3, 4, 1, 9, 1]))
    assert subject_gc(subject) == pytest.approx((6 + 2.7 / 1.025) / 9, rel=1e-12)


def test_tree_is_perfectly_congruent():
    rng = np.random.default_rng(3)
    n = 15
    w = np.zeros((n, n))
    for v in range(1, n):
        u = int(rng.integers(v))
        w[u, v] = w[v, u] = rng.uniform(1, 50)
    assert subject_gc(SubjectNetwork("tree", w)) == pytest.approx(1.0)


def random_strengths(seed, n=10, p=0.4):
    rng = np.random.default_rng(seed)
    mask = np.triu(rng.random((n, n)) < p, 1)
    w = np.where(mask, rng.integers(1, 100, (n, n)), 0).astype(float)
    return w + w.T


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_gc_bounds_and_relabel_invariance(seed):
    w = random_strengths(seed)
    if len(giant_component(w > 0)) < 3:
        return
    try:
        value = subject_gc(SubjectNetwork("a", w))
    except DomainError:
        return
    assert 0.0 <= value <= 1.0 + 1e-12
    perm = np.random.default_rng(seed + 1).permutation(len(w))
    assert subject_gc(SubjectNetwork("b", w[np.ix_(perm, perm)])) == pytest.approx(value, rel=1e-12)


def test_disconnected_subject_uses_giant_component(caplog):
    w = np.zeros((9, 9))
    w[:6, :6] = ring([1, 3, 4, 1, 9, 1])
    w[6, 7] = w[7, 6] = 2.0
    res = analyze_subject(SubjectNetwork("split", w))
    assert (res.n_nodes, res.n_used) == (9, 6)
    assert res.excluded_pairs == 36 - 15
    assert res.gc == pytest.approx((6 + 2.7 / 1.025) / 9)
    assert "giant component" in caplog.text


def _cohort(seed_offset=0):
    subjects = []
    for k in range(8):
        subjects.append(SubjectNetwork(f"s{k}", random_strengths(100 + k + seed_offset, n=12, p=0.5),
                                       {"sex": "F" if k % 2 else "M", "age": str(20 + 5 * k)}))
    return subjects


def test_identical_groups_not_significant():
    subjects = _cohort()
    twins = [SubjectNetwork(s.id + "_twin", s.matrix, {"sex": "X"}) for s in subjects]
    for s in subjects:
        s.group_labels["sex"] = "Y"
    res = group_compare(subjects + twins, "sex", "X", "Y")
    assert res.gc_a == res.gc_b
    assert res.mwu.p_value > 0.9


def test_group_ranges_and_unknown_label():
    subjects = _cohort()
    res = group_compare(subjects, "age", "20-34", "35-60")
    assert res.ids_a == ["s0", "s1", "s2"]
    assert len(res.ids_b) == 5
    with pytest.raises(DomainError):
        group_compare(subjects, "handedness", "L", "R")
    with pytest.raises(DomainError):
        group_compare(subjects, "sex", "F", "unknown")


def test_manifest_skips_missing_files(tmp_path, caplog):
    np.savetxt(tmp_path / "a.csv", ring([1, 2, 3, 4, 5]), delimiter=",")
    (tmp_path / "m.csv").write_text("subject_id,file,sex\na,a.csv,F\nb,b.csv,M\n")
    subjects = load_manifest(tmp_path / "m.csv")
    assert [s.id for s in subjects] == ["a"]
    assert subjects[0].group_labels == {"sex": "F"}
    assert "missing" in caplog.text
    with pytest.raises(DataError):
        load_manifest(tmp_path / "m.csv", skip_missing=False)


def test_synthetic_cohort_preserves_geodesic_congruence(tmp_path):
    from geocongruence.generator import NpsoParams, generate
    from geocongruence.experiments import derive_seed

    manifest = write_synthetic_cohort(tmp_path, groups={"g": 2.5}, N=40, m=3, per_group=1)
    (subject,) = load_manifest(manifest)
    net = generate(NpsoParams(N=40, m=3, T=0.1, gamma=2.5, C=4, seed=derive_seed(0, 6, 2.5, 0.1, 4, 0)))
    expected = gc(pair_records(net), Reference.GSP).gc
    assert subject_gc(subject) == pytest.approx(expected, rel=1e-6)
