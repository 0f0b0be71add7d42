import numpy as np
import pytest
from sklearn.base import clone

from univoque.estimators import DimensionStaircase, ExpansionTransformer, UnivoqueRegimeClassifier


def test_staircase_transform():
    est = DimensionStaircase(kind="psi").fit([[1.5], [1.9], [2.0]])
    out = est.transform([[1.5], [1.9], [2.0]])
    assert out.shape == (3, 2)
    assert np.all(out[:, 0] <= out[:, 1])
    assert out[0, 1] < 1e-9 and out[2, 0] > 0.99


def test_staircase_phi_matches_psi():
    psi = DimensionStaircase(kind="psi").fit_transform([1.8])
    phi = DimensionStaircase(kind="phi").fit_transform([1.25])
    np.testing.assert_array_equal(psi, phi)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        DimensionStaircase(kind="chi").fit([[1.5]])
    with pytest.raises(ValueError):
        DimensionStaircase().fit([[1.5, 1.6]])
    with pytest.raises(ValueError):
        ExpansionTransformer(kind="lazy").fit([[0.5]])


def test_unfitted_raises():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        DimensionStaircase().transform([[1.5]])


def test_classifier():
    clf = UnivoqueRegimeClassifier().fit([[0.5]])
    assert list(clf.classes_) == ["full_dim", "positive_dim", "countable", "singleton"]
    pred = clf.predict([[0.5], [1.2], [1.5], [2.0]])
    assert list(pred) == ["full_dim", "positive_dim", "countable", "singleton"]


def test_expansion_transformer():
    out = ExpansionTransformer(q="2", n_digits=4).fit_transform([[0.5], [0.25]])
    assert out.tolist() == [[1, 0, 0, 0], [0, 1, 0, 0]]
    quasi = ExpansionTransformer(q="2", n_digits=4, kind="quasi").fit_transform([[0.5]])
    assert quasi.tolist() == [[0, 1, 1, 1]]


@pytest.mark.parametrize("est", [DimensionStaircase(N=12), UnivoqueRegimeClassifier(M=2),
                                 ExpansionTransformer(n_digits=8)])
def test_clone_preserves_params(est):
    assert clone(est).get_params() == est.get_params()
