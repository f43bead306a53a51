import math

import numpy as np
import pytest

from censored_newsvendor.demand import DemandGenerator, generate, load_scripted, save_scripted


def test_constant():
    assert list(generate(DemandGenerator("constant", 3, 5, value=1), 0)) == [1, 1, 1]


def test_iid_binomial_mean():
    d = generate(DemandGenerator("iid-binomial", 100_000, 30), 123)
    assert abs(d.mean() - 15) < 0.1
    assert d.min() >= 0 and d.max() <= 30


def test_binomial_histogram_matches_pmf():
    d = generate(DemandGenerator("iid-binomial", 1_000_000, 30), 9)
    emp = np.bincount(d, minlength=31) / d.size
    pmf = np.array([math.comb(30, k) for k in range(31)]) / 2.0 ** 30
    assert 0.5 * np.abs(emp - pmf).sum() < 0.01


def test_shifted_window():
    T = 100_000
    gen = DemandGenerator("shifted-binomial", T, 30)
    lo, hi = gen.low_window()
    assert (lo, hi) == (20_000, 50_000)
    d = generate(gen, 5)
    inside = d[lo - 1:hi]
    outside = np.concatenate([d[:lo - 1], d[hi:]])
    assert abs(inside.mean() - 3) < 0.05 and abs(outside.mean() - 15) < 0.05


def test_window_rounding_odd_horizon():
    gen = DemandGenerator("shifted-binomial", 11, 30)
    assert gen.low_window() == (3, 5)
    q = gen.success_probabilities()
    assert list(np.nonzero(q == 0.1)[0] + 1) == [3, 4, 5]


def test_seed_determinism_and_variation():
    gen = DemandGenerator("iid-binomial", 200, 30)
    seqs = [generate(gen, s) for s in range(10)]
    assert all(np.array_equal(generate(gen, s), seqs[s]) for s in range(10))
    for a in range(10):
        for b in range(a + 1, 10):
            assert not np.array_equal(seqs[a], seqs[b])


def test_scripted_roundtrip(tmp_path):
    f = tmp_path / "d.txt"
    save_scripted(f, [0, 3, 5, 2])
    gen = DemandGenerator("scripted", 3, 5, path=str(f))
    assert list(generate(gen, 0)) == [0, 3, 5]


@pytest.mark.parametrize("content", ["1\n7\n", "1\nx\n", "", "-1\n"])
def test_scripted_rejects_bad_files(tmp_path, content):
    f = tmp_path / "d.txt"
    f.write_text(content)
    with pytest.raises(ValueError):
        load_scripted(f, 5)


def test_scripted_too_short(tmp_path):
    f = tmp_path / "d.txt"
    save_scripted(f, [1, 2])
    with pytest.raises(ValueError):
        generate(DemandGenerator("scripted", 3, 5, path=str(f)), 0)


@pytest.mark.parametrize("kw", [dict(kind="poisson"), dict(trials=40), dict(prob=1.5),
                                dict(kind="constant", value=31), dict(kind="scripted"),
                                dict(horizon=0)])
def test_invalid_config(kw):
    base = dict(kind="iid-binomial", horizon=10, D=30)
    base.update(kw)
    with pytest.raises(ValueError):
        DemandGenerator(**base)
