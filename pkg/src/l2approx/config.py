"""Numerical knobs shared by the pipelines."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    zero_split: float = 1e-8  # numeric zero for eigenvalues of finite Laplacians
    tol_psd: float = 1e-9
    tie_tol: float = 1e-9  # eigenvalues within this of lambda count as <= lambda
    kernel_tol: float = 1e-7  # numeric kernel on the torus
    char_poly_limit: int = 400
    dense_limit: int = 4000
    betti: float = 1e-2  # residual tolerance for the convergence verdict
    liminf: float = 0.05  # oracle functional may exceed the window minimum of I_m by this much
    fk: float = 0.01  # slack for log det'_pi >= 0
    window: int = 3  # number of largest m used for finite lim sup / lim inf renderings

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"tolerance {f.name} must be positive")

    def override(self, **kwargs) -> "Tolerances":
        names = {f.name: f.type for f in fields(self)}
        cast = {}
        for key, value in kwargs.items():
            if key not in names:
                raise KeyError(f"unknown tolerance {key!r}; choose from {sorted(names)}")
            cast[key] = int(value) if names[key] == "int" else float(value)
        return replace(self, **cast)
