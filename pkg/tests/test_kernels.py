import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wdsubgraph import _kernels

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="needs numba to compare backends")


def csr(n, pairs):
    src = np.array([p[0] for p in pairs], dtype=np.int64)
    dst = np.array([p[1] for p in pairs], dtype=np.int64)
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[order]


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40),
    st.integers(0, n - 1))))
def test_reachable_backends_agree(case):
    n, pairs, start = case
    indptr, indices = csr(n, pairs)
    a = _kernels.reachable(indptr, indices, start, backend="numba")
    b = _kernels.reachable(indptr, indices, start, backend="numpy")
    assert np.array_equal(a, b)
    # independent check: repeated relaxation
    seen = {start}
    changed = True
    while changed:
        changed = False
        for u, v in pairs:
            if u in seen and v not in seen:
                seen.add(v)
                changed = True
    assert set(np.flatnonzero(a).tolist()) == seen


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-50, 50), max_size=60), st.sets(st.integers(-50, 50), max_size=30))
def test_member_mask_backends_agree(values, members):
    vals = np.array(values, dtype=np.int64)
    sset = np.array(sorted(members), dtype=np.int64)
    expected = np.array([v in members for v in values], dtype=bool)
    assert np.array_equal(_kernels.member_mask(vals, sset, backend="numba"), expected)
    assert np.array_equal(_kernels.member_mask(vals, sset, backend="numpy"), expected)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=50))
def test_degree_backends_agree(pairs):
    h = np.array([p[0] for p in pairs], dtype=np.int64)
    t = np.array([p[1] for p in pairs], dtype=np.int64)
    a = _kernels.incidence_degree(h, t, 10, backend="numba")
    b = _kernels.incidence_degree(h, t, 10, backend="numpy")
    assert np.array_equal(a, b)
    assert a.sum() == 2 * len(pairs)


@pytest.mark.parametrize("seed", [0, 1, 2**63, 2**64 - 1])
def test_splitmix_backends_agree(seed):
    assert np.array_equal(_kernels.splitmix64(seed, 1000, "numba"), _kernels.splitmix64(seed, 1000, "numpy"))


def _splitmix_py(seed, n):
    mask = (1 << 64) - 1
    state, out = seed, []
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


@pytest.mark.parametrize("seed", [0, 42, 2**64 - 1])
def test_splitmix_matches_pure_python(seed):
    assert _kernels.splitmix64(seed, 50, "numpy").tolist() == _splitmix_py(seed, 50)


def test_splitmix_first_output_seed_zero():
    assert int(_kernels.splitmix64(0, 1)[0]) == 0xE220A8397B1DCDAF


def test_unique_rows():
    rows = np.array([[2, 1, 0], [1, 5, 5], [2, 1, 0], [1, 2, 9]])
    assert _kernels.unique_rows(rows).tolist() == [[1, 2, 9], [1, 5, 5], [2, 1, 0]]
    assert _kernels.unique_rows(np.empty((0, 3))).shape == (0, 3)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.splitmix64(0, 1, backend="cuda")
