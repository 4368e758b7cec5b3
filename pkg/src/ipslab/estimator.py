"""A scikit-learn style front end: a protocol as a (non-learning) string classifier."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_int, check_strings
from .harness import Scenario, run_trials
from .langspace import LanguageSpec
from .protocols import get_protocol


class ProtocolClassifier(ClassifierMixin, BaseEstimator):
    """Labels each input string 1 (accepted) or 0 by majority over ``trials`` runs.

    ``fit`` learns nothing; it validates the configuration and records the
    protocol and the seen classes, so the estimator composes with sklearn tooling.
    Timeouts count as non-acceptance.
    """

    def __init__(self, protocol="thm6-usquare", strategy="honest", trials=25, seed=0, spec=None,
                 protocol_params=None, threshold=0.5):
        self.protocol = protocol
        self.strategy = strategy
        self.trials = trials
        self.seed = seed
        self.spec = spec
        self.protocol_params = protocol_params
        self.threshold = threshold

    def _spec(self):
        if self.spec is None or isinstance(self.spec, LanguageSpec):
            return self.spec
        return LanguageSpec.from_dict(self.spec)

    def fit(self, X, y=None):
        X = check_strings(X)
        check_int(self.trials, "trials", minimum=1)
        check_int(self.seed, "seed", minimum=0)
        self.protocol_info_ = get_protocol(self.protocol)
        self.spec_ = self._spec()
        if X:
            # builds (and so validates) a scenario on the first input
            Scenario(self.protocol, X[0], self.spec_, self.strategy, params=dict(self.protocol_params or {}))
        self.classes_ = np.array([0, 1]) if y is None else np.unique(np.asarray(y, dtype=int))
        self.n_features_in_ = 1
        return self

    def accept_rate(self, X) -> np.ndarray:
        check_is_fitted(self, "protocol_info_")
        out = []
        for i, w in enumerate(check_strings(X)):
            sc = Scenario(self.protocol, w, self.spec_, self.strategy, params=dict(self.protocol_params or {}))
            st = run_trials(sc, N=self.trials, seed=self.seed + i)
            out.append(st.accepts / st.trials)
        return np.array(out, dtype=float)

    def predict_proba(self, X) -> np.ndarray:
        p = self.accept_rate(X)
        return np.column_stack([1 - p, p])

    def predict(self, X) -> np.ndarray:
        return (self.accept_rate(X) > self.threshold).astype(int)
