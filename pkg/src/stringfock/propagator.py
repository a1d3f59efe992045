"""Fundamental solutions, the propagator kernel, the symplectic form, and
smeared commutator values for the center-of-mass wave operator.

Conventions, fixed once and verified by the test suite:

* the kernel of E = E+ - E- has Cauchy data (0, +delta) at time zero, which
  is what makes <U, F> = sigma(U, EF) and the field commutator come out with
  no stray factors;
* the Pauli-Jordan function returned by :func:`pauli_jordan` is the
  negative of that kernel (data (0, -delta)), the usual commutator-function
  normalization; in 1+1 dimensions at mass zero it equals -sign(t)/2 inside
  the cone.

The primary evaluation route is time-domain leapfrog evolution, which keeps
its support properties for every mass level including the tachyonic one; a
momentum quadrature cross-check is provided for nonnegative mass squared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ._exact import scalar_to_complex
from .config import worker_count as cfg_worker_count


# ---------------------------------------------------------------------------
# bumps and smearing functions

def bump_profile(s):
    """The standard compactly supported profile exp(-1/(1-s^2)) on |s| < 1."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(-1.0 / (1.0 - si * si))
    return out


@dataclass(frozen=True)
class Bump1D:
    center: float = 0.0
    radius: float = 1.0
    amplitude: float = 1.0

    def __call__(self, x):
        return self.amplitude * bump_profile((np.asarray(x, dtype=float) - self.center)
                                             / self.radius)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        s = (x - self.center) / self.radius
        out = np.zeros_like(s)
        inside = np.abs(s) < 1.0
        si = s[inside]
        w = 1.0 - si * si
        out[inside] = self.amplitude * np.exp(-1.0 / w) * (-2.0 * si / (w * w)) / self.radius
        return out

    @property
    def lo(self):
        return self.center - self.radius

    @property
    def hi(self):
        return self.center + self.radius

    def shifted(self, delta):
        return replace(self, center=self.center + delta)


@dataclass(frozen=True)
class SpacetimeBump:
    """Product bump b(t) * prod_i b_i(x_i) on d_cm-dimensional spacetime."""

    time: Bump1D
    space: tuple

    def __call__(self, t, *xs):
        val = self.time(t)
        for b, x in zip(self.space, xs):
            val = val * b(x)
        return val

    @property
    def d_cm(self):
        return 1 + len(self.space)

    def spatial_values(self, axes):
        vals = [b(ax) for b, ax in zip(self.space, axes)]
        out = vals[0]
        for v in vals[1:]:
            out = np.multiply.outer(out, v)
        return out

    def time_window(self):
        return self.time.lo, self.time.hi

    def translated(self, dt=0.0, dx=()):
        space = tuple(b.shifted(d) for b, d in zip(self.space, tuple(dx) + (0.0,) * len(self.space)))
        return SpacetimeBump(self.time.shifted(dt), space)


@dataclass(frozen=True)
class InternalVector:
    """Exact internal Fock vector over a LevelBasis with a fixed metric."""

    basis: object
    metric: object
    coeffs: dict   # basis index -> Fraction (or exact complex)

    def levels(self):
        lv = sorted({self.basis.levels[i] for i in self.coeffs if self.coeffs[i]})
        return lv

    def project_level(self, level):
        return {i: c for i, c in self.coeffs.items()
                if self.basis.levels[i] == level and c}

    def level_pairing(self, other, level):
        """<self, P_level other> through the exact Gram, returned as complex."""
        from .oscillators import gram
        g = gram(self.basis, self.metric)
        mine = self.project_level(level)
        theirs = other.project_level(level)
        val = g.inner(mine, theirs)
        return scalar_to_complex(val)


@dataclass(frozen=True)
class SmearingFunction:
    """Spacetime bump tensored with an internal Fock vector."""

    bump: SpacetimeBump
    internal: InternalVector

    def mass_levels(self, a):
        a = Fraction(a)
        return {level: float(2 * level - 2 * a) for level in self.internal.levels()}


def internal_level_weights(F, G, a):
    """{r: <F_int, P_r G_int>} over the levels both internal parts touch."""
    a = Fraction(a)
    out = {}
    for level in sorted(set(F.internal.levels()) & set(G.internal.levels())):
        w = F.internal.level_pairing(G.internal, level)
        if w != 0:
            out[float(2 * level - 2 * a)] = w
    return out


# ---------------------------------------------------------------------------
# grids and the leapfrog engine

@dataclass(frozen=True)
class BoxGrid:
    """Uniform box grid over the spatial directions (Dirichlet boundary)."""

    mins: tuple
    h: float
    shape: tuple

    @classmethod
    def covering(cls, intervals, h, pad=0.0):
        mins = []
        shape = []
        for lo, hi in intervals:
            lo -= pad
            hi += pad
            n = int(math.ceil((hi - lo) / h)) + 1
            mins.append(lo)
            shape.append(n)
        return cls(tuple(mins), float(h), tuple(shape))

    @property
    def ndim(self):
        return len(self.shape)

    def axes(self):
        return [self.mins[i] + self.h * np.arange(self.shape[i]) for i in range(self.ndim)]

    def cell_volume(self):
        return self.h ** self.ndim

    def zeros(self):
        return np.zeros(self.shape)


def stable_dt(h, dims, r, safety=0.98):
    """Largest time step keeping every lattice mode on the unit circle."""
    return safety * h / math.sqrt(dims + max(r, 0.0) * h * h / 4.0)


def _laplacian(u, h):
    out = -2.0 * u.ndim * u
    for ax in range(u.ndim):
        out += np.roll(u, 1, axis=ax) + np.roll(u, -1, axis=ax)
    return out / (h * h)


def _zero_boundary(u):
    for ax in range(u.ndim):
        sl = [slice(None)] * u.ndim
        sl[ax] = 0
        u[tuple(sl)] = 0.0
        sl[ax] = -1
        u[tuple(sl)] = 0.0


def _sweep(grid, r, dt, t0, steps, u_prev, u_cur, source=None, hooks=()):
    """Advance leapfrog ``steps`` times from (u_prev, u_cur) at t0.

    ``source`` is called as source(t) -> array or None; each hook is called
    as hook(step_index, t, u) for every held field including the initial
    one.  Returns (u_prev, u_cur, t) at the final time.
    """
    h = grid.h
    t = t0
    for hook in hooks:
        hook(0, t, u_cur)
    for k in range(steps):
        rhs = _laplacian(u_cur, h) - r * u_cur
        if source is not None:
            s = source(t)
            if s is not None:
                rhs = rhs + s
        u_next = 2.0 * u_cur - u_prev + dt * dt * rhs
        _zero_boundary(u_next)
        u_prev, u_cur = u_cur, u_next
        t = t0 + (k + 1) * dt
        for hook in hooks:
            hook(k + 1, t, u_cur)
    return u_prev, u_cur, t


def _taylor_back_step(u0, v0, r, grid, dt, source_at_t0=None):
    """u(t0 - dt) from Cauchy data at t0, second order."""
    rhs = _laplacian(u0, grid.h) - r * u0
    if source_at_t0 is not None:
        rhs = rhs + source_at_t0
    u_prev = u0 - dt * v0 + 0.5 * dt * dt * rhs
    _zero_boundary(u_prev)
    return u_prev


@dataclass
class CauchyData:
    """Field and its time derivative on a spatial grid at one time."""

    grid: BoxGrid
    t0: float
    u: np.ndarray
    v: np.ndarray

    def copy(self):
        return CauchyData(self.grid, self.t0, self.u.copy(), self.v.copy())

    def time_reversed(self):
        return CauchyData(self.grid, -self.t0, self.u.copy(), -self.v)

    def support_mass_outside(self, radius):
        axes = self.grid.axes()
        rr = np.zeros(self.grid.shape)
        for i, ax in enumerate(axes):
            shape = [1] * self.grid.ndim
            shape[i] = len(ax)
            rr = rr + (ax.reshape(shape)) ** 2
        outside = np.sqrt(rr) > radius
        total = float(np.sum(self.u ** 2))
        if total == 0.0:
            return 0.0
        return float(np.sum(self.u[outside] ** 2)) / total


def evolve_cauchy(data, r, t_target, dt=None, hooks=(), safety=0.98):
    """Evolve Cauchy data to ``t_target`` (either direction), leapfrog.

    The time step divides the interval exactly; the returned data carries a
    centered time derivative.  Backward evolution uses the time symmetry of
    the equation (flip v, evolve forward, flip back).
    """
    span = t_target - data.t0
    if span == 0.0:
        return data.copy()
    if span < 0.0:
        rev = evolve_cauchy(data.time_reversed(), r, -t_target, dt=dt, hooks=hooks,
                            safety=safety)
        out = rev.time_reversed()
        return out
    dt0 = dt if dt is not None else stable_dt(data.grid.h, data.grid.ndim, r, safety)
    steps = max(1, int(math.ceil(span / dt0 - 1e-12)))
    dt_eff = span / steps
    u_prev = _taylor_back_step(data.u, data.v, r, data.grid, dt_eff)
    u_prev, u_cur, t = _sweep(data.grid, r, dt_eff, data.t0, steps, u_prev, data.u.copy(),
                              hooks=hooks)
    # one extra step for the centered derivative at the arrival time
    rhs = _laplacian(u_cur, data.grid.h) - r * u_cur
    u_next = 2.0 * u_cur - u_prev + dt_eff * dt_eff * rhs
    _zero_boundary(u_next)
    v = (u_next - u_prev) / (2.0 * dt_eff)
    return CauchyData(data.grid, t, u_cur, v)


# ---------------------------------------------------------------------------
# retarded / advanced machinery

@dataclass
class _SourceSampler:
    bump: SpacetimeBump
    grid: BoxGrid
    sign_t: float = 1.0

    def __post_init__(self):
        self.spatial = self.bump.spatial_values(self.grid.axes())

    def __call__(self, t):
        amp = float(self.bump.time(np.array([self.sign_t * t]))[0])
        if amp == 0.0:
            return None
        return amp * self.spatial


class _SmearAccumulator:
    """Accumulates dt * h^D * sum f(t, x) u(t, x) over a sweep."""

    def __init__(self, bump, grid, dt, sign_t=1.0):
        self.bump = bump
        self.grid = grid
        self.dt = dt
        self.sign_t = sign_t
        self.spatial = bump.spatial_values(grid.axes())
        self.total = 0.0
        lo, hi = bump.time_window()
        self.window = (min(sign_t * lo, sign_t * hi), max(sign_t * lo, sign_t * hi))

    def __call__(self, k, t, u):
        if t < self.window[0] - self.dt or t > self.window[1] + self.dt:
            return
        amp = float(self.bump.time(np.array([self.sign_t * t]))[0])
        if amp == 0.0:
            return
        self.total += self.dt * self.grid.cell_volume() * amp * float(np.sum(self.spatial * u))


class _HistoryRecorder:
    def __init__(self):
        self.times = []
        self.fields = []

    def __call__(self, k, t, u):
        self.times.append(t)
        self.fields.append(u.copy())

    def stacked(self):
        return np.asarray(self.times), np.stack(self.fields)


def _retarded_sweep(bump, r, grid, dt, t_end, hooks=()):
    """Solve the source problem forward from quiescent data below the source."""
    t_start = bump.time.lo - 2.0 * dt
    steps = max(1, int(math.ceil((t_end - t_start) / dt)))
    src = _SourceSampler(bump, grid)
    u_prev = grid.zeros()
    u_cur = grid.zeros()
    return _sweep(grid, r, dt, t_start, steps, u_prev, u_cur, source=src, hooks=hooks)


def smear_E_scalar_multi(f_bumps, g_bump, r, grid, dt):
    """[ integral f_i (E g) ] for several test bumps against one source.

    Two quiescent-past sweeps: the retarded solution directly, and the
    advanced solution through time reversal of the reversed source.
    """
    results = np.zeros(len(f_bumps))
    # retarded part
    t_end = max([f.time.hi for f in f_bumps] + [g_bump.time.hi]) + 2.0 * dt
    accs = [_SmearAccumulator(f, grid, dt) for f in f_bumps]
    _retarded_sweep(g_bump, r, grid, dt, t_end, hooks=accs)
    for i, acc in enumerate(accs):
        results[i] += acc.total
    # advanced part: v_adv(t) = v_ret[g(-.)](-t)
    g_rev = SpacetimeBump(Bump1D(-g_bump.time.center, g_bump.time.radius,
                                 g_bump.time.amplitude), g_bump.space)
    t_end_rev = max([-f.time.lo for f in f_bumps] + [g_rev.time.hi]) + 2.0 * dt
    accs_rev = [_SmearAccumulator(f, grid, dt, sign_t=-1.0) for f in f_bumps]
    _retarded_sweep(g_rev, r, grid, dt, t_end_rev, hooks=accs_rev)
    for i, acc in enumerate(accs_rev):
        results[i] -= acc.total
    return results


def smear_E_scalar(f_bump, g_bump, r, grid, dt):
    return float(smear_E_scalar_multi([f_bump], g_bump, r, grid, dt)[0])


# ---------------------------------------------------------------------------
# the spec-level operations

@dataclass(frozen=True)
class EvaluatorControls:
    """Quadrature and lattice controls for pointwise kernel evaluation."""

    xmax: float = 8.0
    h: float = 0.01
    safety: float = 0.98
    width: float = 0.08     # mollification width of the initial delta
    momentum_cutoff: float = 400.0


class PauliJordanEvaluator:
    """Lattice evaluator for the commutator function at one mass level.

    Evolves the mollified data (0, -delta_width) once per requested time
    span and interpolates; values are odd in t by construction, and the
    evaluator reports an a-posteriori error estimate from the mollification
    width and lattice spacing.
    """

    def __init__(self, r, d_cm=2, controls=None):
        if d_cm < 2:
            raise ValueError("d_cm must be >= 2")
        self.r = float(r)
        self.d_cm = d_cm
        self.controls = controls or EvaluatorControls()
        dims = d_cm - 1
        c = self.controls
        self.grid = BoxGrid.covering([(-c.xmax, c.xmax)] * dims, c.h)
        self.dt = stable_dt(c.h, dims, self.r, c.safety)
        self._times = None
        self._history = None

    def _mollifier(self):
        c = self.controls
        axes = self.grid.axes()
        norm = None
        out = None
        for ax in axes:
            b = bump_profile(ax / c.width)
            scale = np.trapezoid(b, ax)
            b = b / scale
            out = b if out is None else np.multiply.outer(out, b)
        return out

    def _ensure(self, t_needed):
        if self._times is not None and self._times[-1] >= t_needed:
            return
        rec = _HistoryRecorder()
        u0 = self.grid.zeros()
        v0 = -self._mollifier()
        u_prev = _taylor_back_step(u0, v0, self.r, self.grid, self.dt)
        steps = int(math.ceil((t_needed + 2 * self.dt) / self.dt))
        _sweep(self.grid, self.r, self.dt, 0.0, steps, u_prev, u0, hooks=(rec,))
        self._times, self._history = rec.stacked()

    def value(self, t, x):
        """Mollified commutator-function value at (t, x); x is a point or tuple."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if xs.shape[-1] != self.grid.ndim and self.grid.ndim == 1:
            xs = xs.reshape(-1, 1)
        sign = 1.0
        if t < 0:
            t, sign = -t, -1.0
        self._ensure(t)
        from scipy.interpolate import RegularGridInterpolator
        k = int(math.floor(t / self.dt))
        k = min(max(k, 0), len(self._times) - 2)
        frac = (t - self._times[k]) / self.dt
        slab = (1.0 - frac) * self._history[k] + frac * self._history[k + 1]
        interp = RegularGridInterpolator(self.grid.axes(), slab,
                                         bounds_error=False, fill_value=0.0)
        vals = interp(xs)
        out = sign * vals
        return float(out[0]) if out.size == 1 else out

    def antisymmetry_defect(self, t, x):
        return abs(self.value(t, x) + self.value(-t, x))


def pauli_jordan(r, t, x, d_cm=2, controls=None, evaluator=None):
    """Commutator function at one spacetime point (time-domain route)."""
    ev = evaluator or PauliJordanEvaluator(r, d_cm, controls)
    return ev.value(t, x)


def pauli_jordan_momentum(r, t, x, width=0.08, p_cutoff=400.0, n_points=120001):
    """Momentum-quadrature cross-check of the mollified commutator function.

    Only for d_cm = 2 and r >= 0 (the contour route; tachyonic levels are
    handled in the time domain).  Evaluates
    -(1/pi) int_0^P cos(p x) sin(w t)/w  mhat(p) dp with mhat the mollifier
    transform, matching the lattice evaluator's mollification.
    """
    if r < 0:
        raise ValueError("momentum route is restricted to r >= 0")
    ys = np.linspace(-width, width, 2001)
    m = bump_profile(ys / width)
    m /= np.trapezoid(m, ys)
    ps = np.linspace(0.0, p_cutoff, n_points)
    mhat = np.empty_like(ps)
    chunk = 4000
    for i in range(0, len(ps), chunk):
        block = ps[i:i + chunk]
        mhat[i:i + chunk] = np.trapezoid(m[None, :] * np.cos(np.outer(block, ys)), ys, axis=1)
    w = np.sqrt(ps * ps + r)
    with np.errstate(invalid="ignore", divide="ignore"):
        kern = np.where(w > 0, np.sin(w * t) / np.where(w > 0, w, 1.0), t)
    vals = np.cos(ps * x) * kern * mhat
    return float(-np.trapezoid(vals, ps) / np.pi)


@dataclass
class LevelComponent:
    level: int
    r: float
    internal: dict      # basis index -> exact coefficient
    data: CauchyData


@dataclass
class RegularSolution:
    """Solution with compactly supported Cauchy data, one scalar field per
    internal mass component."""

    components: list
    basis: object
    metric: object

    def component(self, level):
        for c in self.components:
            if c.level == level:
                return c
        return None


def _internal_components(F, a):
    a = Fraction(a)
    out = []
    for level in F.internal.levels():
        coeffs = F.internal.project_level(level)
        if coeffs:
            out.append((level, float(2 * level - 2 * a), coeffs))
    return out


def apply_E(F, a, grid, dt=None, safety=0.98):
    """E F as a regular solution: retarded minus advanced, per mass component.

    Cauchy data is returned at t = 0; the source bump may straddle zero.
    """
    comps = []
    for level, r, coeffs in _internal_components(F, a):
        dte = dt if dt is not None else stable_dt(grid.h, grid.ndim, r, safety)
        data = _apply_E_scalar(F.bump, r, grid, dte)
        comps.append(LevelComponent(level, r, coeffs, data))
    return RegularSolution(comps, F.internal.basis, F.internal.metric)


def _apply_E_scalar(bump, r, grid, dt):
    ret = _cauchy_at_zero_retarded(bump, r, grid, dt)
    bump_rev = SpacetimeBump(Bump1D(-bump.time.center, bump.time.radius,
                                    bump.time.amplitude), bump.space)
    adv_rev = _cauchy_at_zero_retarded(bump_rev, r, grid, dt)
    u = ret.u - adv_rev.u
    v = ret.v + adv_rev.v
    return CauchyData(grid, 0.0, u, v)


def _cauchy_at_zero_retarded(bump, r, grid, dt):
    if bump.time.lo > dt:
        # source entirely in the future: the retarded solution vanishes at 0
        return CauchyData(grid, 0.0, grid.zeros(), grid.zeros())
    keep = {}

    def catcher(k, t, u):
        if abs(t) <= 1.5 * dt:
            keep[round(t / dt)] = (t, u.copy())

    t_start = bump.time.lo - 2.0 * dt
    # land exactly on t = 0
    steps_to_zero = int(math.ceil(-t_start / dt))
    t_start = -steps_to_zero * dt
    src = _SourceSampler(bump, grid)
    _sweep(grid, r, dt, t_start, steps_to_zero + 1, grid.zeros(), grid.zeros(),
           source=src, hooks=(catcher,))
    t_m, u_m = keep[-1]
    t_0, u_0 = keep[0]
    t_p, u_p = keep[1]
    v = (u_p - u_m) / (2.0 * dt)
    return CauchyData(grid, 0.0, u_0, v)


def symplectic_form(U, V, t=0.0, dt=None, safety=0.98):
    """sigma(U, V) at time t: the conserved pairing of two regular solutions.

    Internal Fock pairing through the exact Gram, spatial quadrature on the
    common grid.  Exactly conserved by the lattice flow for matching grids,
    up to roundoff.
    """
    from .oscillators import gram
    g = gram(U.basis, U.metric)
    total = 0.0
    for cu in U.components:
        cv = V.component(cu.level)
        if cv is None:
            continue
        # real conjugation taken componentwise in the monomial basis
        w = scalar_to_complex(g.inner(cu.internal, cv.internal)).real
        if w == 0.0:
            continue
        du = evolve_cauchy(cu.data, cu.r, t, dt=dt, safety=safety)
        dv = evolve_cauchy(cv.data, cv.r, t, dt=dt, safety=safety)
        integrand = du.u * dv.v - du.v * dv.u
        total += w * float(np.sum(integrand)) * du.grid.cell_volume()
    return total


def pair_solution_with_test(U, F, a, dt=None, safety=0.98):
    """<U, F>: spacetime integral of the solution against the test function."""
    from .oscillators import gram
    g = gram(U.basis, U.metric)
    total = 0.0
    f_comps = {level: coeffs for level, _, coeffs in _internal_components(F, a)}
    for cu in U.components:
        coeffs = f_comps.get(cu.level)
        if coeffs is None:
            continue
        w = scalar_to_complex(g.inner(cu.internal, coeffs)).real
        if w == 0.0:
            continue
        dte = dt if dt is not None else stable_dt(cu.data.grid.h, cu.data.grid.ndim,
                                                  cu.r, safety)
        start = evolve_cauchy(cu.data, cu.r, F.bump.time.lo - dte, dt=dte, safety=safety)
        acc = _SmearAccumulator(F.bump, cu.data.grid, dte)
        u_prev = _taylor_back_step(start.u, start.v, cu.r, start.grid, dte)
        steps = int(math.ceil((F.bump.time.hi - start.t0) / dte)) + 2
        _sweep(start.grid, cu.r, dte, start.t0, steps, u_prev, start.u.copy(), hooks=(acc,))
        total += w * acc.total
    return total


def smeared_commutator(F, G, a, grid=None, dt=None, h=0.02, safety=0.98, pad=1.0):
    """-i <F, E G>: the smeared field commutator value.

    Factorizes over mass levels: exact internal pairing times the scalar
    smear of the propagator kernel between the spacetime bumps.
    """
    weights = internal_level_weights(F, G, a)
    if not weights:
        return complex(0.0, 0.0)
    if grid is None:
        grid = _grid_for_bumps([F.bump, G.bump], h, pad=pad)
    total = 0.0 + 0.0j
    for r, w in sorted(weights.items()):
        dte = dt if dt is not None else stable_dt(grid.h, grid.ndim, r, safety)
        k_val = smear_E_scalar(F.bump, G.bump, r, grid, dte)
        total += w * k_val
    return -1j * total


def _grid_for_bumps(bumps, h, pad=1.0):
    # the retarded/advanced sweeps run across the union of all time windows,
    # so waves can spread by the full span in either spatial direction
    dims = bumps[0].d_cm - 1
    t_lo = min(b.time.lo for b in bumps)
    t_hi = max(b.time.hi for b in bumps)
    span = t_hi - t_lo
    intervals = []
    for ax in range(dims):
        lo = min(b.space[ax].lo for b in bumps)
        hi = max(b.space[ax].hi for b in bumps)
        intervals.append((lo - span, hi + span))
    return BoxGrid.covering(intervals, h, pad=pad)


def separation_kind(f_bump, g_bump):
    """'spacelike' / 'timelike' / 'mixed' classification of two bump supports."""
    dt_min, dt_max = _interval_gap_and_span(f_bump.time, g_bump.time)
    gaps = []
    spans = []
    for bf, bg in zip(f_bump.space, g_bump.space):
        gap, span = _interval_gap_and_span(bf, bg)
        gaps.append(gap)
        spans.append(span)
    # worst-case spatial distance bounds over the product supports
    dist_min = math.sqrt(sum(g * g for g in gaps))
    dist_max = math.sqrt(sum(s * s for s in spans))
    if dist_min > dt_max:
        return "spacelike"
    if dist_max < dt_min:
        return "timelike"
    return "mixed"


def _interval_gap_and_span(b1, b2):
    lo1, hi1, lo2, hi2 = b1.lo, b1.hi, b2.lo, b2.hi
    gap = max(0.0, max(lo1, lo2) - min(hi1, hi2))
    span = max(hi1, hi2) - min(lo1, lo2)
    return gap, span


@dataclass
class LocalityRow:
    separation: float
    kind: str
    commutator_abs: float
    control_magnitude: float
    per_level: dict


def locality_scan(separations, timelike_offsets, levels, F_int, G_int, a,
                  bump_radius=0.5, h=0.004, safety=0.98, pad=1.2):
    """Smeared commutator magnitudes across spacelike and timelike placements.

    The source bump sits at the origin; spacelike test bumps are displaced
    spatially by each separation, timelike controls are displaced in time.
    Returns (rows, control_magnitude).
    """
    g_bump = SpacetimeBump(Bump1D(0.0, bump_radius), (Bump1D(0.0, bump_radius),))
    placements = []
    for s in separations:
        placements.append((float(s), g_bump.translated(dx=(float(s),))))
    for t_off in timelike_offsets:
        placements.append((float(t_off), g_bump.translated(dt=float(t_off))))
    f_bumps = [b for _, b in placements]
    grid = _grid_for_bumps(f_bumps + [g_bump], h, pad=pad)

    weights = {}
    G = SmearingFunction(g_bump, G_int)
    F0 = SmearingFunction(g_bump, F_int)
    for r, w in internal_level_weights(F0, G, a).items():
        weights[r] = w
    wanted = sorted(float(r) for r in levels)
    for r in wanted:
        if r not in weights:
            raise ValueError(f"internal vectors give no weight at mass level r = {r}")

    def solve_level(r):
        dte = stable_dt(grid.h, grid.ndim, r, safety)
        return r, smear_E_scalar_multi(f_bumps, g_bump, r, grid, dte)

    workers = cfg_worker_count()
    if workers > 1 and len(wanted) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_level = dict(pool.map(solve_level, wanted))
    else:
        per_level = dict(solve_level(r) for r in wanted)

    totals = []
    for i in range(len(placements)):
        tot = sum(weights[r] * per_level[r][i] for r in wanted)
        totals.append(abs(tot))
    rows = []
    control = 0.0
    for i, (s, fb) in enumerate(placements):
        kind = separation_kind(fb, g_bump)
        if kind != "spacelike":
            control = max(control, totals[i])
    for i, (s, fb) in enumerate(placements):
        kind = separation_kind(fb, g_bump)
        rows.append(LocalityRow(
            separation=s,
            kind=kind,
            commutator_abs=totals[i],
            control_magnitude=control,
            per_level={r: float(per_level[r][i]) for r in wanted},
        ))
    return rows, control


def fourth_order_residual(times, history, h, dt, r, bump=None, grid=None):
    """Independent wave-operator residual of a recorded evolution.

    Applies fourth-order centered stencils in time and space to the stored
    history, subtracts the source, and returns the max-abs residual over the
    interior.  A second-order-accurate solution leaves an O(h^2) residual
    here, so halving the spacing should quarter the result.
    """
    u = np.asarray(history)
    nt = u.shape[0]
    if nt < 5:
        raise ValueError("need at least five stored time slices")
    c = (-1.0, 16.0, -30.0, 16.0, -1.0)

    def second_diff(arr, axis, step):
        out = np.zeros_like(arr)
        for off, w in zip((-2, -1, 0, 1, 2), c):
            out += w * np.roll(arr, -off, axis=axis)
        return out / (12.0 * step * step)

    utt = second_diff(u, 0, dt)
    lap = np.zeros_like(u)
    for ax in range(1, u.ndim):
        lap += second_diff(u, ax, h)
    res = utt - lap + r * u
    if bump is not None and grid is not None:
        axes = grid.axes()
        spatial = bump.spatial_values(axes)
        tvals = bump.time(np.asarray(times))
        res = res - tvals.reshape((-1,) + (1,) * (u.ndim - 1)) * spatial[None, ...]
    interior = tuple(slice(2, -2) for _ in range(u.ndim))
    return float(np.max(np.abs(res[interior])))


def retarded_history(bump, r, grid, dt, t_end):
    """Full recorded retarded solve, for residual and support diagnostics."""
    rec = _HistoryRecorder()
    _retarded_sweep(bump, r, grid, dt, t_end, hooks=(rec,))
    return rec.stacked()
