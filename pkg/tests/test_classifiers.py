import numpy as np
import pytest
from sklearn.base import clone

from attrlink.disambiguation import LinearSvcModel, LogRegModel, RandomForestModel, binary_prf
from attrlink.disambiguation.classifiers import logistic_loss_grad, svc_objective
from attrlink.errors import DegenerateDatasetError

# linearly separable, symmetric about the origin
TOY_X = np.array([[2.0, 1.0], [1.0, 2.0], [-1.0, -2.0], [-2.0, -1.0]])
TOY_Y = np.array([1, 1, 0, 0])


def relative_error(a, b):
    return np.max(np.abs(a - b) / np.maximum(1e-8, np.abs(a) + np.abs(b)))


def numeric_grad(w, b, X, y, lam, eps=1e-5):
    gw = np.zeros_like(w)
    for k in range(len(w)):
        d = np.zeros_like(w)
        d[k] = eps
        gw[k] = (logistic_loss_grad(w + d, b, X, y, lam)[0] - logistic_loss_grad(w - d, b, X, y, lam)[0]) / (2 * eps)
    gb = (logistic_loss_grad(w, b + eps, X, y, lam)[0] - logistic_loss_grad(w, b - eps, X, y, lam)[0]) / (2 * eps)
    return gw, gb


def test_logreg_zero_model_scores_half():
    model = LogRegModel(epochs=0).fit(TOY_X, TOY_Y)
    assert np.allclose(model.decision_scores(np.random.default_rng(0).normal(size=(5, 2))), 0.5)


def test_logreg_separable_toy():
    model = LogRegModel().fit(TOY_X, TOY_Y)
    assert (model.predict(TOY_X) == TOY_Y).all()
    assert model.loss_history_[-1] < model.loss_history_[0]


@pytest.mark.parametrize("seed", range(25))
def test_logreg_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(12, 6))
    y = rng.integers(0, 2, size=12)
    w, b = rng.normal(size=6), float(rng.normal())
    _, gw, gb = logistic_loss_grad(w, b, X, y, 0.1)
    nw, nb = numeric_grad(w, b, X, y, 0.1)
    assert relative_error(np.append(gw, gb), np.append(nw, nb)) < 1e-4


def test_svc_separable_toy_margins():
    model = LinearSvcModel().fit(TOY_X, TOY_Y)
    margins = model.decision_scores(TOY_X)
    assert (np.sign(margins) == np.where(TOY_Y == 1, 1, -1)).all()


def test_svc_zero_model():
    model = LinearSvcModel(epochs=0).fit(TOY_X, TOY_Y)
    assert np.array_equal(model.decision_scores(TOY_X), np.zeros(4))


@pytest.mark.parametrize("seed", range(10))
def test_svc_averaged_objective_non_increasing_on_toy_set(seed):
    model = LinearSvcModel(seed=seed).fit(TOY_X, TOY_Y)
    h = np.array(model.objective_history_)
    assert np.all(np.diff(h) <= 1e-12), f"objective rises at epochs {np.nonzero(np.diff(h) > 1e-12)[0] + 1}"


@pytest.mark.parametrize("lam", [0.001, 0.1, 1.0])
def test_svc_objective_descends_for_other_regularization(lam):
    for seed in range(3):
        model = LinearSvcModel(lam=lam, seed=seed, epochs=100).fit(TOY_X, TOY_Y)
        assert np.all(np.diff(model.objective_history_) <= 1e-12)


def test_svc_objective_ends_below_start():
    model = LinearSvcModel(seed=0).fit(TOY_X, TOY_Y)
    ypm = np.where(TOY_Y == 1, 1.0, -1.0)
    assert model.objective_history_[-1] < model.objective_history_[0]
    assert model.objective_history_[-1] == pytest.approx(
        svc_objective(model.coef_, model.intercept_, TOY_X, ypm, model.lam))


def test_rf_single_leaf_scores_positive_rate():
    X = np.arange(10.0).reshape(5, 2)
    y = np.array([1, 0, 1, 1, 0])
    flat = RandomForestModel(n_trees=1, max_depth=0, bootstrap=False).fit(X, y)
    assert np.allclose(flat.decision_scores(X), 0.6)
    bagged = RandomForestModel(n_trees=1, max_depth=0).fit(X, y)
    assert len(set(bagged.decision_scores(X).tolist())) == 1


def test_rf_perfectly_separating_feature():
    rng = np.random.default_rng(0)
    y = np.array([0, 1] * 10)
    X = np.column_stack([rng.normal(size=20), y + 0.1 * rng.random(20), rng.normal(size=20)])
    model = RandomForestModel(n_trees=25, seed=1).fit(X, y)
    assert binary_prf(y, model.predict(X)).f1 == 1.0


def test_rf_determinism():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(40, 5))
    y = (X[:, 0] + 0.5 * rng.normal(size=40) > 0).astype(int)
    a = RandomForestModel(n_trees=10, seed=4).fit(X, y).decision_scores(X)
    b = RandomForestModel(n_trees=10, seed=4).fit(X, y).decision_scores(X)
    c = RandomForestModel(n_trees=10, seed=5).fit(X, y).decision_scores(X)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("cls", [LogRegModel, LinearSvcModel, RandomForestModel])
def test_single_class_rejected(cls):
    with pytest.raises(DegenerateDatasetError):
        cls().fit(TOY_X, np.ones(4, dtype=int))


@pytest.mark.parametrize("cls", [LogRegModel, LinearSvcModel, RandomForestModel])
def test_estimator_contract(cls):
    model = cls(seed=2)
    twin = clone(model)
    assert twin.get_params() == model.get_params()
    model.fit(TOY_X, TOY_Y)
    restored = cls(**model.get_params()).set_state(model.get_state())
    assert np.array_equal(restored.decision_scores(TOY_X), model.decision_scores(TOY_X))


def test_logreg_anti_monotone_link_count():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(60, 3))
    y = (X[:, 0] > 0).astype(int)
    scores = LogRegModel().fit(X, y).decision_scores(X)
    counts = [int((scores > t).sum()) for t in np.linspace(0, 1, 41)]
    assert counts == sorted(counts, reverse=True)
