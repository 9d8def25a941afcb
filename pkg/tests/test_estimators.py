import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from oracles import werner_matrix
from sepcert.estimators import (
    SeparabilityModulusEstimator,
    SpectralSeparabilityClassifier,
    SpectrumTransformer,
    check_states,
)
from sepcert.state import maximally_mixed, random_density_matrix


@pytest.fixture
def states():
    rng = np.random.default_rng(4)
    return [random_density_matrix((2, 2), rng) for _ in range(5)]


def test_check_states_accepts_arrays_and_states(states):
    out = check_states([states[0], states[1].matrix], (2, 2))
    assert len(out) == 2 and out[1].dims == states[1].dims
    assert len(check_states(states[0], (2, 2))) == 1


def test_check_states_errors(states):
    with pytest.raises(ValueError, match="sample 1"):
        check_states([states[0], np.diag([1, 1, 0, 0])], (2, 2))
    with pytest.raises(ValueError, match="dims"):
        check_states([maximally_mixed((4,))], (2, 2))
    with pytest.raises(ValueError, match="no samples"):
        check_states([], (2, 2))


@pytest.mark.parametrize("est", [SpectrumTransformer(), SeparabilityModulusEstimator(),
                                 SpectralSeparabilityClassifier()])
def test_params_and_clone(est):
    params = est.get_params()
    assert params["dims"] == (2, 2)
    c = clone(est).set_params(dims=(2, 3))
    assert c.get_params()["dims"] == (2, 3) and est.dims == (2, 2)


@pytest.mark.parametrize("est", [SpectrumTransformer(), SeparabilityModulusEstimator(),
                                 SpectralSeparabilityClassifier()])
def test_not_fitted(est, states):
    meth = est.predict if hasattr(est, "predict") else est.transform
    with pytest.raises(NotFittedError):
        meth(states)


def test_spectrum_transformer(states):
    x = SpectrumTransformer().fit_transform(states)
    assert x.shape == (5, 4) and np.allclose(x.sum(axis=1), 1)
    b = SpectrumTransformer(representation="barycentric").fit_transform(states)
    assert np.allclose(b.sum(axis=1), 1) and np.all(b >= -1e-12)
    p = SpectrumTransformer(representation="partial-sums").fit_transform(states)
    assert np.allclose(p[:, -1], 1)
    with pytest.raises(ValueError):
        SpectrumTransformer(representation="eigen").fit()


def test_in_pipeline(states):
    out = make_pipeline(SpectrumTransformer(), StandardScaler()).fit_transform(states)
    assert out.shape == (5, 4)


def test_modulus_estimator():
    X = [werner_matrix(t) for t in (0.2, 0.5, 1.0)]
    est = SeparabilityModulusEstimator().fit()
    ell = est.transform(X)
    assert ell.shape == (3, 1)
    assert np.allclose(ell[:, 0], [1.0, 2 / 3, 1 / 3], atol=1e-8)
    assert est.l_bound_.value == pytest.approx(1 / 3)
    assert all(b.exact for b in est.brackets(X))
    with pytest.raises(ValueError):
        SeparabilityModulusEstimator(tol=0).fit()


def test_classifier():
    X = [werner_matrix(t) for t in (0.1, 0.3, 0.5, 0.9)]
    clf = SpectralSeparabilityClassifier().fit()
    assert clf.predict(X).tolist() == [True, True, False, False]
    assert clf.thresholds_["purity"] == pytest.approx(1 / 3)
    assert list(clf.classes_) == [False, True]
    # score against the PPT truth: Werner states are separable iff t <= 1/3
    assert clf.score(X, [True, True, False, False]) == 1.0


def test_classifier_subset():
    clf = SpectralSeparabilityClassifier(detectors=["partial-sums"]).fit()
    reps = clf.reports([werner_matrix(0.2)])[0]
    assert [r.detector_name for r in reps] == ["partial-sum-1", "partial-sum-2", "partial-sum-3"]
    with pytest.raises(ValueError):
        SpectralSeparabilityClassifier(detectors=["magic"]).fit()
    with pytest.raises(ValueError):
        SpectralSeparabilityClassifier(detectors=[]).fit()
