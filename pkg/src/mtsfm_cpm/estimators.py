"""Estimator-style front ends for the two fit-shaped stages.

Both classes follow scikit-learn conventions (constructor stores
hyperparameters verbatim, ``fit`` learns trailing-underscore attributes and
returns self, ``get_params``/``set_params`` round-trip), so they work with
``sklearn.base.clone`` without this package importing scikit-learn.
"""

import inspect
import warnings

from ._validation import as_float_vector
from .mtsfm import fit_fourier, min_harmonics, mtsfm_modulation, mtsfm_phase, synthesize_mtsfm
from .optimizer import OptimizerConfig, optimize

__all__ = ["MtsfmSmoother", "GisrOptimizer"]


class _ParamsMixin:
    """get_params/set_params over the constructor signature."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"invalid parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self


class MtsfmSmoother(_ParamsMixin):
    """Fit a truncated Fourier series to a phase code's instantaneous phase.

    Parameters
    ----------
    harmonics : int or None
        Harmonic count K; None picks the adequacy bound ceil(N/2). A value
        below the bound is allowed with a warning.
    pulse_length : float or None
        Pulse length in seconds; None uses one second per chip.

    Attributes (after fit)
    ----------------------
    params_ : MtsfmParams
    n_chips_ : int
    min_harmonics_ : int
    """

    def __init__(self, harmonics=None, pulse_length=None):
        self.harmonics = harmonics
        self.pulse_length = pulse_length

    def fit(self, X, y=None):
        """Fit to chip phases X (radians, shape (n_chips,))."""
        phases = as_float_vector(getattr(X, "phases", X), "X")
        self.n_chips_ = phases.size
        self.min_harmonics_ = min_harmonics(self.n_chips_)
        K = self.harmonics if self.harmonics is not None else self.min_harmonics_
        if K < self.min_harmonics_:
            warnings.warn(
                f"harmonics={K} is below the adequacy bound {self.min_harmonics_} "
                f"for {self.n_chips_} chips; inter-chip transitions may be lost",
                UserWarning, stacklevel=2)
        T = self.pulse_length if self.pulse_length is not None else float(self.n_chips_)
        self.params_ = fit_fourier(phases, T, K)
        return self

    def _check_fitted(self):
        if not hasattr(self, "params_"):
            raise RuntimeError("this MtsfmSmoother instance is not fitted yet")

    def predict(self, t):
        """Smoothed instantaneous phase at time(s) t."""
        self._check_fitted()
        return mtsfm_phase(self.params_, t)

    def modulation(self, t):
        """Instantaneous frequency (Hz) at time(s) t."""
        self._check_fitted()
        return mtsfm_modulation(self.params_, t)

    def synthesize(self, n_samples=None):
        """Unit-energy waveform from the fitted phase; default density is
        32 samples per chip."""
        self._check_fitted()
        if n_samples is None:
            n_samples = max(32 * self.n_chips_, 4 * self.params_.K)
        return synthesize_mtsfm(self.params_, n_samples)


class GisrOptimizer(_ParamsMixin):
    """Minimize the p-norm sidelobe ratio under the RMS-bandwidth band constraint.

    The constructor mirrors OptimizerConfig's public knobs; ``fit`` takes an
    MtsfmParams initialization (for instance MtsfmSmoother().fit(code).params_).

    Attributes (after fit)
    ----------------------
    result_ : OptimizationResult
    params_ : MtsfmParams, the best feasible iterate
    converged_ : bool
    """

    def __init__(self, p=10, delta=0.1, max_iterations=400,
                 objective_tolerance=1e-8, fd_step=1e-4, n_samples=None,
                 log_every=1):
        self.p = p
        self.delta = delta
        self.max_iterations = max_iterations
        self.objective_tolerance = objective_tolerance
        self.fd_step = fd_step
        self.n_samples = n_samples
        self.log_every = log_every

    def _config(self):
        return OptimizerConfig(p=self.p, delta=self.delta,
                               max_iterations=self.max_iterations,
                               objective_tolerance=self.objective_tolerance,
                               fd_step=self.fd_step, n_samples=self.n_samples,
                               log_every=self.log_every)

    def fit(self, X, y=None):
        """Run the descent from the initialization X (an MtsfmParams)."""
        self.result_ = optimize(X, self._config())
        self.params_ = self.result_.params
        self.converged_ = self.result_.converged
        return self

    def score(self, X=None, y=None):
        """Negative final sidelobe ratio in dB (larger is better)."""
        if not hasattr(self, "result_"):
            raise RuntimeError("this GisrOptimizer instance is not fitted yet")
        return -self.result_.final_gisr_db
