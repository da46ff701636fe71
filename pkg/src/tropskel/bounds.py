"""Closed-form degree bounds, all evaluated with exact integer arithmetic.

>>> t_of_g(10)
29
>>> D_bound(4, 2, planar=True)
2
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

from .rational import ceil_div, ceil_fraction

__all__ = [
    "BoundReport",
    "D_bound",
    "bound_report",
    "castelnuovo",
    "check_bound_consistency",
    "ell_bound",
    "plane_genus",
    "remark_ell_bound",
    "t_of_g",
]


def _check_int(name: str, value, lo: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an integer")
    if value < lo:
        raise ValueError(f"{name} must be >= {lo}, got {value}")
    return value


def t_of_g(g: int) -> int:
    """Degree threshold for a faithful tropicalization of a genus-``g`` skeleton."""
    _check_int("g", g, 0)
    if g == 0:
        return 1
    if g == 1:
        return 3
    return 3 * g - 1


def D_bound(d: int, N: int, planar: bool = False) -> int:
    """Divisor-degree bound for a degree-``d`` curve in ``N``-space.

    ``max(ceil((3d^2 - 9d + 4) / (2d)), 1)`` when ``N <= 2`` or ``planar``,
    and ``max(d - 2, 1)`` otherwise.
    """
    _check_int("d", d, 1)
    _check_int("N", N, 1)
    if N <= 2 or planar:
        return max(ceil_div(3 * d * d - 9 * d + 4, 2 * d), 1)
    return max(d - 2, 1)


def castelnuovo(d: int, N: int) -> tuple[int, int, int]:
    """Return ``(m0, eps0, pi)`` with ``d - 1 = m0 (N - 1) + eps0``.

    ``pi = (m0 + 1)(eps0 + d - 1) / 2 - (d - 1)`` is Castelnuovo's genus bound.

    Examples
    --------
    >>> castelnuovo(6, 3)
    (2, 1, 4)
    """
    _check_int("N", N, 3)
    _check_int("d", d, 1)
    if d < N:
        raise ValueError(f"need d >= N, got d={d}, N={N}")
    m0, eps0 = divmod(d - 1, N - 1)
    twice = (m0 + 1) * (eps0 + d - 1) - 2 * (d - 1)
    # the product is always even; keep the check as a guard on the algebra
    assert twice % 2 == 0 and twice == m0 * (m0 - 1) * (N - 1) + 2 * m0 * eps0
    return m0, eps0, twice // 2


def ell_bound(g: int, d: int, N: int) -> int:
    """Smallest admissible ``ell``: ``ceil(t(g)/d)``, raised to ``d + 1 - N`` for ``N >= 3``."""
    _check_int("d", d, 1)
    _check_int("N", N, 1)
    base = ceil_div(t_of_g(g), d)
    if N <= 2:
        return base
    return max(base, d + 1 - N)


def remark_ell_bound(d: int, N: int) -> int:
    """The Castelnuovo-derived bound ``max(ceil(3(m0+1)(eps0+d-1)/(2d) - (3d-2)/d), d+1-N)``.

    For ``pi <= 1`` the first term is replaced by 1 since ``t(pi)/d <= 1`` there.
    """
    m0, eps0, pi = castelnuovo(d, N)
    if pi <= 1:
        first = 1
    else:
        first = ceil_fraction(Fraction(3 * (m0 + 1) * (eps0 + d - 1), 2 * d) - Fraction(3 * d - 2, d))
    return max(first, d + 1 - N)


def plane_genus(d: int) -> int:
    """Genus ``(d - 1)(d - 2) / 2`` of a smooth plane curve of degree ``d``."""
    _check_int("d", d, 1)
    return (d - 1) * (d - 2) // 2


def check_bound_consistency(d: int, N: int) -> bool:
    """True when ``D_bound(d, N)`` dominates the ell-bounds at ``g = pi(d, N)``."""
    _check_int("N", N, 3)
    if d < N:
        raise ValueError(f"need 3 <= N <= d, got d={d}, N={N}")
    _, _, pi = castelnuovo(d, N)
    D = D_bound(d, N, planar=False)
    return D >= ell_bound(pi, d, N) and D >= remark_ell_bound(d, N)


@dataclass(frozen=True)
class BoundReport:
    """All bounds for one ``(g, d, N)`` query; absent quantities are ``None``."""

    g: int | None
    d: int | None
    N: int | None
    t_g: int | None
    D_bound: int | None
    ell_bound: int | None
    m0: int | None
    eps0: int | None
    pi: int | None
    planar_flag: bool
    consistent: bool | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def bound_report(g: int | None = None, d: int | None = None, N: int | None = None, planar: bool = False) -> BoundReport:
    """Collect every bound that makes sense for the given inputs.

    With ``d`` and ``N`` but no ``g``, the genus defaults to Castelnuovo's
    number for ``N >= 3`` and to the plane-curve genus when ``N <= 2`` or
    ``planar``.
    """
    m0 = eps0 = pi = None
    D = ell = None
    consistent = None
    if d is not None or N is not None:
        if d is None or N is None:
            raise ValueError("--d and --n must be given together")
        D = D_bound(d, N, planar)
        if N >= 3 and d >= N:
            m0, eps0, pi = castelnuovo(d, N)
            consistent = check_bound_consistency(d, N)
        if g is None:
            g = plane_genus(d) if (N <= 2 or planar) else pi
        if g is not None:
            ell = ell_bound(g, d, N)
    t = t_of_g(g) if g is not None else None
    return BoundReport(g, d, N, t, D, ell, m0, eps0, pi, bool(planar), consistent)
