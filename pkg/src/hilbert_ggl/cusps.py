"""Cusp resolution cycles for Hilbert modular surfaces.

A cusp of the surface is described by a fractional module M = Z*alpha + Z*beta
together with a finite-index subgroup V of the totally positive units
preserving M.  The boundary of the minimal resolution is a cycle of rational
curves whose combinatorics are read off from the periodic minus continued
fraction ("HJ expansion", digits all >= 2) of a reduced quadratic surd
attached to (M, V).

Everything here is exact: surds are tracked through their (P, Q) state,
boundary rays are field elements with Fraction coordinates, and the unit eta
identified by the cycle is compared against the fundamental unit computed
independently in field_invariants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .cyclic import _wedge_check
from .errors import DomainError
from .field_invariants import _check_field_discriminant, fundamental_unit
from .quadratic import QuadElem, QuadSurd

_MAX_PREPERIOD = 100_000
_MAX_PERIOD = 100_000
_MAX_V_POWER = 512


def periodic_hj(w: QuadSurd) -> list[int]:
    """Period word of the minus continued fraction of a reduced surd.

    Requires w > 1 and 0 < w' < 1 (purely periodic case).  For other surds
    call find_equivalent_reduced first.
    """
    if not w.is_hj_reduced():
        raise DomainError(
            "surd %s is not reduced (need w > 1 and 0 < w' < 1); "
            "apply find_equivalent_reduced first" % (w,)
        )
    start = w.state()
    digits = []
    cur = w
    while True:
        b, cur = cur.hj_step()
        digits.append(b)
        if cur.state() == start:
            return digits
        if len(digits) > _MAX_PERIOD:
            raise RuntimeError("period of %s did not close within %d steps" % (w, _MAX_PERIOD))


def find_equivalent_reduced(w: QuadSurd) -> QuadSurd:
    """Iterate the expansion of w until the tail surd is reduced."""
    cur = w
    for _ in range(_MAX_PREPERIOD):
        if cur.is_hj_reduced():
            return cur
        _, cur = cur.hj_step()
    raise RuntimeError("no reduced surd equivalent to %s found within %d steps" % (w, _MAX_PREPERIOD))


def _expand_to_reduced(theta: QuadElem) -> tuple[QuadSurd, tuple[int, int, int, int]]:
    """Expand theta until reduced, tracking the Moebius head.

    Returns (w, (a, b, c, d)) with theta = (a*w + b) / (c*w + d) and
    a*d - b*c = 1.
    """
    w = QuadSurd.from_elem(theta)
    a, b, c, d = 1, 0, 0, 1
    for _ in range(_MAX_PREPERIOD):
        if w.is_hj_reduced():
            return w, (a, b, c, d)
        digit, w = w.hj_step()
        a, b, c, d = a * digit + b, -a, c * digit + d, -c
    raise RuntimeError("expansion of %s did not reach a reduced surd" % (theta,))


def _default_surd(D: int) -> QuadSurd:
    """Reduced surd for the standard cusp module O_K with V = all totally
    positive units.

    For odd D this is (p + sqrt(D)) / 2 with p the unique odd (for D odd)
    integer in (sqrt(D), sqrt(D) + 2); for D divisible by 4 it is
    a + sqrt(D/4) with a = floor(sqrt(D/4)) + 1.
    """
    s = isqrt(D)
    if D % 2:
        p = s + 1 if (s + 1) % 2 else s + 2
        w = QuadSurd(p, 2, D)
    else:
        m = D // 4
        a = isqrt(m) + 1
        w = QuadSurd(2 * a, 2, D)
    if not w.is_hj_reduced():
        raise RuntimeError("default surd %s for D=%d is not reduced" % (w, D))
    return w


def _coerce_elem(x, D: int, what: str) -> QuadElem:
    if isinstance(x, QuadElem):
        if x.D != D:
            raise DomainError("%s lives in the field of discriminant %d, expected %d" % (what, x.D, D))
        return x
    if isinstance(x, (int, Fraction)):
        return QuadElem.from_rational(Fraction(x), D)
    raise DomainError("%s must be a field element or a rational, got %r" % (what, x))


def _module_multiplier(alpha: QuadElem, beta: QuadElem, D: int):
    """Reduced surd and scaling factor for the module Z*alpha + Z*beta.

    Writes beta/alpha = (a*w + b)/(c*w + d) with w reduced, then lam =
    alpha / (c*w + d) turns the intrinsic rays mu_k of w into totally
    positive module elements lam * mu_k.  The sign of lam is free; if
    neither lam nor -lam is totally positive the roles of alpha and beta
    are swapped (which conjugates the orientation).
    """

    def attempt(al: QuadElem, be: QuadElem):
        theta = be / al
        if theta.y == 0:
            raise DomainError("module generators are rationally dependent")
        if theta.y < 0:
            theta = -theta
        w, (_, _, c, d) = _expand_to_reduced(theta)
        denom = c * w.elem(D) + QuadElem.from_rational(d, D)
        if denom.is_zero():
            raise RuntimeError("degenerate Moebius head while reducing %s" % (theta,))
        lam = al / denom
        if lam.is_totally_positive():
            return lam, w
        neg = -lam
        if neg.is_totally_positive():
            return neg, w
        return None

    got = attempt(alpha, beta)
    if got is None:
        got = attempt(beta, alpha)
    if got is None:
        raise DomainError(
            "module basis (%s, %s) admits no totally positive ray scaling; "
            "pass the generators of the conjugate module" % (alpha, beta)
        )
    return got


def _coords_in_basis(e: QuadElem, alpha: QuadElem, beta: QuadElem) -> tuple[Fraction, Fraction]:
    """Coordinates of e in the basis (alpha, beta), solved exactly."""
    den = alpha.x * beta.y - alpha.y * beta.x
    if den == 0:
        raise DomainError("module generators are linearly dependent over Q")
    u = (e.x * beta.y - e.y * beta.x) / den
    v = (alpha.x * e.y - alpha.y * e.x) / den
    return u, v


def _rays_from_cycle(w: QuadSurd, digits: list[int], count: int, D: int) -> list[QuadElem]:
    """mu_0 .. mu_count from the three-term recurrence mu_{k+1} = b_k mu_k - mu_{k-1}."""
    w_elem = w.elem(D)
    mus = [QuadElem.from_rational(1, D), digits[0] - w_elem]
    for k in range(1, count):
        b = digits[k % len(digits)]
        mus.append(b * mus[k] - mus[k - 1])
    return mus


@dataclass(frozen=True)
class CuspCycle:
    """Resolution cycle of one cusp.

    digits      period word of V (the module period repeated v_power times)
    period      length of the module period word
    v_power     index of V inside the full totally positive unit group
    rays        mu_0 .. mu_{len(digits)-1}, totally positive module elements
    closing_ray eta^{-1} * mu_0, the ray that would follow rays[-1]
    eta         generator of V picked out by the cycle (mu_0 / mu_{fr})
    eta_period  generator for v_power = 1 (eta = eta_period ** v_power)
    module      the basis (alpha, beta) the rays live in
    ray_coords  integer coordinates of each ray in that basis
    unimodular  True when all consecutive coordinate pairs have det +-1
    """

    D: int
    digits: tuple[int, ...]
    period: int
    v_power: int
    rays: tuple[QuadElem, ...]
    closing_ray: QuadElem
    eta: QuadElem
    eta_period: QuadElem
    module: tuple[QuadElem, QuadElem]
    ray_coords: tuple[tuple[Fraction, Fraction], ...]
    unimodular: bool

    def self_intersections(self) -> tuple[int, ...]:
        """Self-intersection numbers of the cycle curves are -digits."""
        return tuple(-b for b in self.digits)


def cusp_cycle(D: int, module=None, v=None) -> CuspCycle:
    """Resolve the cusp attached to (module, V) over the field of discriminant D.

    module  pair (alpha, beta) of field elements spanning the cusp module,
            default the full ring of integers (1, (D + sqrt(D))/2)
    v       generator of V: either a totally positive unit (QuadElem) or an
            integer f meaning V = eta^f for the cycle unit eta; default the
            full totally positive unit group (f = 1)
    """
    _check_field_discriminant(D)
    unit = fundamental_unit(D)
    eta_field = unit.totally_positive_generator()

    omega = QuadElem.from_pq(D, 1, D)
    if module is None:
        alpha = QuadElem.from_rational(1, D)
        beta = omega
        w = _default_surd(D)
        lam = QuadElem.from_rational(1, D)
    else:
        try:
            raw_alpha, raw_beta = module
        except (TypeError, ValueError):
            raise DomainError("module must be a pair (alpha, beta) of generators") from None
        alpha = _coerce_elem(raw_alpha, D, "alpha")
        beta = _coerce_elem(raw_beta, D, "beta")
        if alpha.is_zero() or beta.is_zero():
            raise DomainError("module generators must be nonzero")
        lam, w = _module_multiplier(alpha, beta, D)

    digits = periodic_hj(w)
    r = len(digits)
    mus = _rays_from_cycle(w, digits, r, D)
    eta_period = mus[r].inverse()
    if not eta_period.is_totally_positive() or not eta_period.is_unit():
        raise RuntimeError("cycle of %s closed on %s, not a totally positive unit" % (w, eta_period))
    if module is None and eta_period != eta_field:
        raise RuntimeError(
            "cycle unit %s disagrees with the totally positive fundamental unit %s"
            % (eta_period, eta_field)
        )

    f = 1
    if v is not None:
        if isinstance(v, int):
            if v < 1:
                raise DomainError("v as an index must be a positive integer, got %d" % v)
            f = v
        else:
            gen = _coerce_elem(v, D, "v")
            if not gen.is_unit() or not gen.is_totally_positive():
                raise DomainError("v = %s is not a totally positive unit" % (gen,))
            acc = QuadElem.from_rational(1, D)
            f = 0
            for k in range(1, _MAX_V_POWER + 1):
                acc = acc * eta_period
                if gen == acc or gen == acc.inverse():
                    f = k
                    break
            if f == 0:
                raise DomainError(
                    "v = %s is not a power of the cycle unit eta = %s (checked up to eta^%d)"
                    % (gen, eta_period, _MAX_V_POWER)
                )

    digits_v = digits * f
    if f > 1:
        mus = _rays_from_cycle(w, digits, f * r, D)
    eta = eta_period ** f

    rays = [lam * mu for mu in mus[: f * r]]
    closing = lam * mus[f * r]
    for mu in rays:
        if not mu.is_totally_positive():
            raise RuntimeError("ray %s is not totally positive" % (mu,))
    if closing != eta.inverse() * rays[0]:
        raise RuntimeError("cycle did not close: mu_%d != eta^-1 * mu_0" % (f * r,))

    # three-term recurrence holds cyclically with the eta twist at the seam
    total = f * r
    for k in range(total):
        prev = eta * rays[total - 1] if k == 0 else rays[k - 1]
        nxt = closing if k == total - 1 else rays[k + 1]
        if digits_v[k] * rays[k] != prev + nxt:
            raise RuntimeError("ray recurrence broken at position %d" % k)

    if any(b < 2 for b in digits_v):
        raise RuntimeError("period word %s has a digit below 2" % (digits_v,))
    if all(b == 2 for b in digits_v):
        raise RuntimeError("period word is all 2s, which no quadratic surd produces")

    coords = []
    for mu in rays:
        u_c, v_c = _coords_in_basis(mu, alpha, beta)
        if u_c.denominator != 1 or v_c.denominator != 1:
            raise RuntimeError("ray %s does not lie in the module (coords %s, %s)" % (mu, u_c, v_c))
        coords.append((u_c, v_c))
    close_u, close_v = _coords_in_basis(closing, alpha, beta)
    if close_u.denominator != 1 or close_v.denominator != 1:
        raise RuntimeError("closing ray %s does not lie in the module" % (closing,))

    if v is not None and not isinstance(v, int):
        for gen_img in (eta * alpha, eta * beta):
            gu, gv = _coords_in_basis(gen_img, alpha, beta)
            if gu.denominator != 1 or gv.denominator != 1:
                raise DomainError("v = eta^%d does not preserve the module" % f)

    dets = []
    ext = coords + [(close_u, close_v)]
    for k in range(total):
        (u1, v1), (u2, v2) = ext[k], ext[k + 1]
        dets.append(u1 * v2 - v1 * u2)
    unimodular = all(abs(d) == 1 for d in dets)

    return CuspCycle(
        D=D,
        digits=tuple(digits_v),
        period=r,
        v_power=f,
        rays=tuple(rays),
        closing_ray=closing,
        eta=eta,
        eta_period=eta_period,
        module=(alpha, beta),
        ray_coords=tuple(coords),
        unimodular=unimodular,
    )


@dataclass(frozen=True)
class CuspChartCheck:
    """Wedge check for one toric chart (mu_k, mu_{k+1}) of a cusp cycle.

    det          exact chart determinant mu_k mu'_{k+1} - mu'_k mu_{k+1}
    sqrt_coeff   det = sqrt_coeff * sqrt(D); rational part is always zero
    multiplicities  exponent of each boundary coordinate in the wedge
    coord_det    determinant of the two rays in module coordinates (if known)
    degenerate   True when the wedge vanished (rays proportional)
    """

    index: int
    det: QuadElem
    sqrt_coeff: Fraction
    multiplicities: tuple[int, ...]
    coord_det: Fraction | None
    degenerate: bool

    @property
    def ok(self) -> bool:
        return not self.degenerate


def chart_tangency(mu1: QuadElem, mu2: QuadElem, index: int = 0, coord_det=None) -> CuspChartCheck:
    """Wedge the two logarithmic boundary forms of a chart spanned by mu1, mu2.

    The rows fed to the wedge engine are the embeddings of each ray, so the
    wedge coefficient is the exact determinant mu1 mu2' - mu1' mu2, a pure
    sqrt(D) multiple.  A vanishing wedge means the rays are proportional and
    the chart is degenerate; that is reported, not raised.
    """
    rows = [(mu1, mu1.conjugate()), (mu2, mu2.conjugate())]
    lam, mult, degenerate = _wedge_check(rows)
    if not degenerate and lam.x != 0:
        raise RuntimeError("chart determinant %s has a rational part" % (lam,))
    return CuspChartCheck(
        index=index,
        det=lam,
        sqrt_coeff=lam.y,
        multiplicities=mult,
        coord_det=coord_det,
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class CuspTangencyReport:
    D: int
    charts: tuple[CuspChartCheck, ...]
    unimodular: bool
    ok: bool


def verify_cusp_tangency(cycle: CuspCycle) -> CuspTangencyReport:
    """Run the wedge check on every chart of a resolved cusp cycle.

    Each consecutive ray pair (including the seam pair ending in
    eta^{-1} mu_0) spans a chart; the wedge of its two logarithmic forms
    must be a single monomial with multiplicity one in each coordinate and
    coefficient equal to the exact ray determinant.
    """
    rays = list(cycle.rays) + [cycle.closing_ray]
    alpha, beta = cycle.module
    checks = []
    for k in range(len(cycle.rays)):
        u1, v1 = _coords_in_basis(rays[k], alpha, beta)
        u2, v2 = _coords_in_basis(rays[k + 1], alpha, beta)
        cd = u1 * v2 - v1 * u2
        checks.append(chart_tangency(rays[k], rays[k + 1], index=k, coord_det=cd))
    unimodular = all(c.coord_det is not None and abs(c.coord_det) == 1 for c in checks)
    ok = all(c.ok for c in checks) and unimodular
    return CuspTangencyReport(D=cycle.D, charts=tuple(checks), unimodular=unimodular, ok=ok)
