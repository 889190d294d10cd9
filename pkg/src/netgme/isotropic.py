"""Closed-form scalar algebra of isotropic states ``p*phi+ + (1-p)*I/d**2``."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class IsotropicParams:
    """Local dimension ``d`` and visibility ``p`` of an isotropic link."""

    d: int
    p: float

    def __post_init__(self) -> None:
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"local dimension must be an integer >= 2, got {self.d}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"visibility must lie in [0, 1], got {self.p}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "p", float(self.p))

    @property
    def threshold(self) -> float:
        return separability_threshold(self.d)

    @property
    def entangled(self) -> bool:
        return self.p > self.threshold

    def with_p(self, p: float) -> "IsotropicParams":
        return IsotropicParams(self.d, p)


def separability_threshold(d: int) -> float:
    """Visibility at and below which the isotropic state is separable."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return 1.0 / (d + 1)


def isotropic_spectrum(params: IsotropicParams) -> list[float]:
    """Eigenvalues, largest first: one ``p + (1-p)/d^2`` and ``d^2 - 1`` copies of ``(1-p)/d^2``."""
    d2 = params.d**2
    noise = (1.0 - params.p) / d2
    return [params.p + noise] + [noise] * (d2 - 1)


def max_ent_fidelity(params: IsotropicParams) -> float:
    return params.p + (1.0 - params.p) / params.d**2


def bsa(params: IsotropicParams) -> float:
    """Weight of the best separable approximation."""
    if params.p <= params.threshold:
        return 1.0
    return (params.d + 1) * (1.0 - params.p) / params.d


def cascade_visibility(p: float, hops: int) -> float:
    """Visibility assigned to a link obtained by teleporting along ``hops`` noisy links: ``p**(2**(hops-1))``."""
    if hops < 1:
        raise ValueError(f"hop count must be >= 1, got {hops}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {p}")
    return p ** (2 ** (hops - 1))


def entropy(params: IsotropicParams) -> float:
    """Von Neumann entropy in base-d logarithm."""
    total = 0.0
    for lam in isotropic_spectrum(params):
        if lam > 0.0:
            total -= lam * math.log(lam)
    return total / math.log(params.d)


def hashing_exponent(params: IsotropicParams) -> float:
    return max(0.0, 1.0 - entropy(params))


@dataclass(frozen=True)
class ExponentModel:
    """Source of the distillation exponent: the hashing surrogate or a fixed value."""

    name: str = "hashing"
    value: float | None = None

    def __post_init__(self) -> None:
        if self.name not in ("hashing", "fixed"):
            raise ValueError(f"unknown exponent model {self.name!r}")
        if self.name == "fixed" and (self.value is None or self.value < 0):
            raise ValueError("fixed exponent model needs a nonnegative value")

    @classmethod
    def parse(cls, text: str) -> "ExponentModel":
        text = text.strip()
        if text == "hashing":
            return cls()
        if text.startswith("fixed:"):
            try:
                return cls("fixed", float(text[len("fixed:"):]))
            except ValueError:
                raise ValueError(f"bad fixed exponent {text!r}") from None
        raise ValueError(f"unknown exponent model {text!r}; use 'hashing' or 'fixed:<value>'")

    def __call__(self, params: IsotropicParams) -> float:
        if self.name == "hashing":
            return hashing_exponent(params)
        return float(self.value)

    def __str__(self) -> str:
        return self.name if self.name == "hashing" else f"fixed:{self.value:g}"


HASHING = ExponentModel()


def log_distillation_error(m: int, params: IsotropicParams, model: ExponentModel = HASHING) -> float:
    """Natural log of ``eps = min(1, 2 (m+1)^(2(d^2-1)) d^(-E m))``; 0 when ``E = 0``."""
    if m < 1:
        raise ValueError(f"copy count must be >= 1, got {m}")
    exponent = model(params)
    d = params.d
    raw = math.log(2.0) + 2 * (d * d - 1) * math.log(m + 1) - exponent * m * math.log(d)
    return min(0.0, raw)


def distillation_error(m: int, params: IsotropicParams, model: ExponentModel = HASHING) -> float:
    return math.exp(log_distillation_error(m, params, model))


def distillation_fidelity_bound(m: int, params: IsotropicParams, model: ExponentModel = HASHING) -> float:
    """Lower bound ``1 - eps`` on the fidelity distilled from ``m`` copies."""
    return 1.0 - distillation_error(m, params, model)


def bs_fidelity_cap(parties: int) -> float:
    """Largest average pairwise fidelity reachable from a biseparable state of ``parties`` parties."""
    if parties < 2:
        raise ValueError(f"need at least two parties, got {parties}")
    return 1.0 - 1.0 / parties


def tensor_bsa_upper(params: IsotropicParams, copies: int) -> float:
    """One-copy upper bound on the BSA of ``copies`` tensor copies."""
    if copies < 1:
        raise ValueError(f"copies must be >= 1, got {copies}")
    return bsa(params)
