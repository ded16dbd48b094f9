import numpy as np
import pytest
from abmsim import utils as ut


def test_key_seeds():
    a = ut.key_rng(42, 1, 3).random(5)
    np.testing.assert_array_equal(a, ut.key_rng(42, 1, 3).random(5))
    assert not np.array_equal(a, ut.key_rng(42, 0, 3).random(5))
    assert not np.array_equal(a, ut.key_rng(42, 1, 3, 1).random(5))
    assert ut.key_seed(42, 1, 3).entropy == ut.key_seed(42, 1, 3, 0).entropy


def test_uniform_in():
    rand_gen = np.random.default_rng(0)
    vals = [ut.uniform_in([3, 5], rand_gen, integer=True) for _ in range(200)]
    assert set(vals) == {3, 4, 5}
    assert ut.uniform_in([2., 2.], rand_gen) == 2.
    with pytest.raises(ValueError):
        ut.uniform_in([5, 3], rand_gen)


def test_mean_std():
    assert ut.mean_std([1., 3.]) == (2., 1.)
    assert ut.mean_std([0.7]) == (0.7, 0.)
    assert all(np.isnan(ut.mean_std([])))


def test_load_config(tmp_path):
    dic = {'sim': {'N': 10}}
    out, origin = ut.load_config(dic)
    out['sim']['N'] = 20
    assert dic['sim']['N'] == 10
    assert origin == 'No config file'
    path = tmp_path / 'c.json'
    path.write_text('{"sim": {"N": 5}}')
    assert ut.load_config(str(path))[0] == {'sim': {'N': 5}}
    path.write_text('- 1\n- 2\n')
    with pytest.raises(ValueError):
        ut.load_config(str(path))
