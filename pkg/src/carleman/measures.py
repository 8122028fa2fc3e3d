"""Finitely supported measures on the complex plane."""
import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DiscreteMeasure:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        wts = np.asarray(self.weights, dtype=float).ravel()
        if pts.shape != wts.shape:
            raise ValueError("points and weights must have the same length")
        if np.any(wts < 0):
            raise ValueError("weights must be non-negative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @classmethod
    def uniform(cls, points):
        pts = np.asarray(points, dtype=complex).ravel()
        return cls(pts, np.full(pts.size, 1.0 / pts.size))

    @property
    def mass(self):
        return float(np.sum(self.weights))

    def moment(self, k):
        """Integral of z**k against the measure."""
        return complex(np.sum(self.weights * self.points**k))

    def log_potential(self, z):
        """Logarithmic potential  U(z) = -sum_i w_i log|z - t_i|."""
        z = np.asarray(z, dtype=complex)
        diff = np.abs(z[..., None] - self.points)
        return -np.sum(self.weights * np.log(diff), axis=-1)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re", "im", "weight"])
            for p, w in zip(self.points, self.weights):
                writer.writerow([repr(float(p.real)), repr(float(p.imag)), repr(float(w))])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        pts = [complex(float(r["re"]), float(r["im"])) for r in rows]
        return cls(np.array(pts), np.array([float(r["weight"]) for r in rows]))
