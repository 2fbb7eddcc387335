from dataclasses import dataclass

import numpy as np


@dataclass
class PriorSpec:
    """Multivariate normal prior on theta."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        self.cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        d = self.mean.size
        if self.cov.shape != (d, d):
            raise ValueError("prior covariance must be %d x %d" % (d, d))
        if not np.allclose(self.cov, self.cov.T):
            raise ValueError("prior covariance must be symmetric")
        try:
            self._chol = np.linalg.cholesky(self.cov)
        except np.linalg.LinAlgError:
            raise ValueError("prior covariance must be positive definite") from None
        self.precision = np.linalg.inv(self.cov)
        self._log_norm = -0.5 * d * np.log(2 * np.pi) - np.log(np.diag(self._chol)).sum()

    @classmethod
    def isotropic(cls, dim, mean=0.0, sd=10.0):
        mean = np.broadcast_to(np.asarray(mean, dtype=float), (dim,)).copy()
        sd = np.broadcast_to(np.asarray(sd, dtype=float), (dim,))
        return cls(mean, np.diag(sd ** 2))

    @property
    def dim(self):
        return self.mean.size

    def logpdf(self, theta):
        """Log density; ``theta`` may be a single point or an (N, d) array."""
        z = np.asarray(theta, dtype=float) - self.mean
        q = np.einsum("...i,ij,...j->...", z, self.precision, z)
        return self._log_norm - 0.5 * q

    def grad(self, theta):
        return -self.precision @ (np.asarray(theta, dtype=float) - self.mean)

    def hessian(self):
        return -self.precision
