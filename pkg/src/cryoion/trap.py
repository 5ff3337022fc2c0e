"""Surface-electrode trap electrostatics in the gapless-plane approximation.

Every electrode is a rectangle in the z=0 plane; the rest of the plane is
grounded.  The basis potential of a rectangle held at unit voltage is the
solid angle it subtends at the field point divided by 2*pi (a sum of four
arctangents), which is harmonic, bounded in [0, 1] and exact for the gapless
model.  Fields come from central differences of the basis potentials, the RF
pseudopotential is q^2 |E|^2 / (4 m Omega^2), and the secular spectrum is the
eigen-decomposition of a Richardson-refined numeric Hessian at the RF null.

Axes: x across the strips, y along the trap axis, z normal to the chip.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import ConfigError, DomainError, NoTrapError
from .units import CONSTANTS, HERTZ, parse_quantity

ROLE_RF = "rf"
ROLE_DC = "dc"
ROLE_CENTER = "center"  # grounded: a covered slot or ground plane strip

#: multi-start heights for the null search (absolute, tuned to ~100 um scale traps)
DEFAULT_START_HEIGHTS = (30e-6, 60e-6, 120e-6, 240e-6)

_FD_SCALE = 1e-4  # central-difference step = height * _FD_SCALE
_MIN_Z = 1e-9


@dataclass(frozen=True)
class IonSpecies:
    mass_kg: float
    charge_c: float
    label: str

    def __post_init__(self):
        if not (self.mass_kg > 0 and self.charge_c != 0):
            raise DomainError("species needs positive mass and non-zero charge")


CA40 = IonSpecies(CONSTANTS.m_ca40, CONSTANTS.elementary_charge, "Ca40")
SR88 = IonSpecies(CONSTANTS.m_sr88, CONSTANTS.elementary_charge, "Sr88")
SPECIES = {"Ca40": CA40, "Sr88": SR88}


@dataclass(frozen=True)
class Strip:
    """Axis-aligned rectangular electrode [x_min,x_max] x [y_min,y_max] at z=0."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    role: str
    dc_index: int | None = None

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise DomainError("strip extents must have positive width and length")
        if self.role not in (ROLE_RF, ROLE_DC, ROLE_CENTER):
            raise DomainError(f"unknown strip role {self.role!r}")
        if self.role == ROLE_DC and self.dc_index is None:
            raise DomainError("dc strips need a dc_index")


@dataclass(frozen=True)
class ElectrodeLayout:
    strips: tuple
    rf_voltage: float  # drive amplitude in V
    rf_omega: float    # drive angular frequency in rad/s

    def __post_init__(self):
        strips = tuple(self.strips)
        if not any(s.role == ROLE_RF for s in strips):
            raise DomainError("layout needs at least one RF strip")
        if not (self.rf_omega > 0 and math.isfinite(self.rf_omega)):
            raise DomainError("rf_omega must be positive")
        if not math.isfinite(self.rf_voltage):
            raise DomainError("rf_voltage must be finite")
        for i, a in enumerate(strips):
            for b in strips[i + 1:]:
                if (min(a.x_max, b.x_max) - max(a.x_min, b.x_min) > 0
                        and min(a.y_max, b.y_max) - max(a.y_min, b.y_min) > 0):
                    raise DomainError("strips overlap with positive area")
        object.__setattr__(self, "strips", strips)

    @property
    def rf_strips(self) -> tuple:
        return tuple(s for s in self.strips if s.role == ROLE_RF)

    @property
    def axial_center(self) -> float:
        ys = [s.y_min for s in self.rf_strips] + [s.y_max for s in self.rf_strips]
        return 0.5 * (min(ys) + max(ys))


# ---------------------------------------------------------------------------
# basis potentials
# ---------------------------------------------------------------------------


def _rect_phi(strip: Strip, px, py, pz):
    """Vectorized unit-voltage basis potential of one rectangle (z > 0)."""
    u1 = strip.x_min - px
    u2 = strip.x_max - px
    v1 = strip.y_min - py
    v2 = strip.y_max - py
    z = pz

    def corner(u, v):
        return np.arctan(u * v / (z * np.sqrt(u * u + v * v + z * z)))

    return (corner(u2, v2) - corner(u1, v2) - corner(u2, v1) + corner(u1, v1)) / (2.0 * math.pi)


def rect_potential(strip: Strip, point) -> float:
    """Basis potential of one rectangle at a single point with z > 0."""
    x, y, z = (float(v) for v in point)
    if z <= 0:
        raise DomainError("potential is defined for z > 0 only")
    return float(_rect_phi(strip, x, y, z))


def _phi_sum(strips: Sequence[Strip], px, py, pz):
    total = 0.0
    for s in strips:
        total = total + _rect_phi(s, px, py, pz)
    return total


def rf_basis_potential(layout: ElectrodeLayout, point) -> float:
    """Sum of RF strip basis potentials (dimensionless, unit drive)."""
    x, y, z = (float(v) for v in point)
    if z <= 0:
        raise DomainError("potential is defined for z > 0 only")
    return float(_phi_sum(layout.rf_strips, x, y, z))


def dc_potential(layout: ElectrodeLayout, voltages: Mapping[int, float] | None, point) -> float:
    """Static potential in V from the DC strips at their set voltages."""
    x, y, z = (float(v) for v in point)
    if z <= 0:
        raise DomainError("potential is defined for z > 0 only")
    if not voltages:
        return 0.0
    total = 0.0
    for s in layout.strips:
        if s.role == ROLE_DC and s.dc_index in voltages:
            total += float(voltages[s.dc_index]) * float(_rect_phi(s, x, y, z))
    return total


def _rf_field_xyz(layout, px, py, pz, step):
    """Vectorized drive-amplitude field -V * grad(phi_rf); step may be an array."""
    strips = layout.rf_strips
    v = layout.rf_voltage
    ex = (_phi_sum(strips, px + step, py, pz) - _phi_sum(strips, px - step, py, pz)) / (2 * step)
    ey = (_phi_sum(strips, px, py + step, pz) - _phi_sum(strips, px, py - step, pz)) / (2 * step)
    ez = (_phi_sum(strips, px, py, pz + step) - _phi_sum(strips, px, py, pz - step)) / (2 * step)
    return -v * ex, -v * ey, -v * ez


def rf_field(layout: ElectrodeLayout, point, step: float | None = None) -> np.ndarray:
    """Peak RF field vector (V/m) at a point; central differences, step = z/1e4."""
    x, y, z = (float(v) for v in point)
    if z <= 0:
        raise DomainError("field is defined for z > 0 only")
    h = z * _FD_SCALE if step is None else float(step)
    ex, ey, ez = _rf_field_xyz(layout, x, y, z, h)
    return np.array([float(ex), float(ey), float(ez)])


def pseudopotential(layout: ElectrodeLayout, species: IonSpecies, point,
                    step: float | None = None) -> float:
    """Time-averaged RF confinement energy q^2 |E|^2 / (4 m Omega^2), in J."""
    e = rf_field(layout, point, step=step)
    return species.charge_c**2 * float(e @ e) / (4.0 * species.mass_kg * layout.rf_omega**2)


def _psi_batch(layout, species, px, py, pz, step):
    ex, ey, ez = _rf_field_xyz(layout, px, py, pz, step)
    e2 = ex * ex + ey * ey + ez * ez
    return species.charge_c**2 * e2 / (4.0 * species.mass_kg * layout.rf_omega**2)


# ---------------------------------------------------------------------------
# RF null search
# ---------------------------------------------------------------------------


def _e_xz(layout, x, z):
    y = layout.axial_center
    h = max(z * _FD_SCALE, _MIN_Z)
    ex, _, ez = _rf_field_xyz(layout, x, y, z, h)
    return float(ex), float(ez)


def _newton_polish(layout, x, z):
    """Drive (E_x, E_z) to zero in the x-z plane; quadratic convergence."""
    for _ in range(60):
        fx, fz = _e_xz(layout, x, z)
        h = z * _FD_SCALE
        jxx = (_e_xz(layout, x + h, z)[0] - _e_xz(layout, x - h, z)[0]) / (2 * h)
        jxz = (_e_xz(layout, x, z + h)[0] - _e_xz(layout, x, z - h)[0]) / (2 * h)
        jzx = (_e_xz(layout, x + h, z)[1] - _e_xz(layout, x - h, z)[1]) / (2 * h)
        jzz = (_e_xz(layout, x, z + h)[1] - _e_xz(layout, x, z - h)[1]) / (2 * h)
        try:
            dx, dz = np.linalg.solve(np.array([[jxx, jxz], [jzx, jzz]]),
                                     np.array([-fx, -fz]))
        except np.linalg.LinAlgError:
            break
        limit = 0.5 * z
        norm = math.hypot(dx, dz)
        if norm > limit:
            dx, dz = dx * limit / norm, dz * limit / norm
        x, z = x + dx, z + dz
        if z <= _MIN_Z:
            return x, -1.0  # left the physical domain
        if norm < 1e-16 * max(z, 1e-6):
            break
    return x, z


def _newton_step_length(layout, x, z) -> float:
    """Length of the Newton correction toward E=0 at (x, z); inf if J is singular.

    At a genuine null this is ~machine noise; at a runaway far-field point,
    where |E| is small only because everything decays, it is of order the
    distance itself — which is what makes it a sound convergence test.
    """
    fx, fz = _e_xz(layout, x, z)
    h = z * _FD_SCALE
    jxx = (_e_xz(layout, x + h, z)[0] - _e_xz(layout, x - h, z)[0]) / (2 * h)
    jxz = (_e_xz(layout, x, z + h)[0] - _e_xz(layout, x, z - h)[0]) / (2 * h)
    jzx = (_e_xz(layout, x + h, z)[1] - _e_xz(layout, x - h, z)[1]) / (2 * h)
    jzz = (_e_xz(layout, x, z + h)[1] - _e_xz(layout, x, z - h)[1]) / (2 * h)
    try:
        dx, dz = np.linalg.solve(np.array([[jxx, jxz], [jzx, jzz]]),
                                 np.array([-fx, -fz]))
    except np.linalg.LinAlgError:
        return math.inf
    return math.hypot(float(dx), float(dz))


def find_rf_null(layout: ElectrodeLayout, species: IonSpecies = CA40,
                 start_heights: Sequence[float] = DEFAULT_START_HEIGHTS) -> "TrapSolution":
    """Locate the RF field null in the x-z plane at the axial center.

    Runs a Nelder-Mead minimization of |E|^2 from each start height, then a
    damped Newton solve of E=0.  A start counts as converged when the Newton
    correction at its end point is below 1e-9 of the height (|E| alone is not
    a usable test: the far field is small everywhere); all converged starts
    agree to well below 1e-9 m for a valid layout.
    """
    if layout.rf_voltage == 0:
        raise NoTrapError("zero RF amplitude traps nothing")
    xs = [s.x_min for s in layout.rf_strips] + [s.x_max for s in layout.rf_strips]
    x0 = 0.5 * (min(xs) + max(xs))
    # a planar-trap null always sits within a few electrode spans of the
    # metal; beyond that the far field decays monotonically (and eventually
    # underflows), which a minimizer would mistake for convergence
    span = (max(s.x_max for s in layout.strips)
            - min(s.x_min for s in layout.strips))
    z_cap = 4.0 * span

    def objective(p):
        x, z = p
        if z <= _MIN_Z or z > z_cap or abs(x - x0) > 2.0 * span:
            return 1e300
        ex, ez = _e_xz(layout, x, z)
        return ex * ex + ez * ez

    candidates = []
    for z0 in start_heights:
        # explicit simplex on the start-height scale so the search path is
        # independent of where the layout sits on the x axis
        simplex = np.array([[x0, z0], [x0 + 0.3 * z0, z0], [x0, 1.5 * z0]])
        res = minimize(objective, np.array([x0, z0]), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-300, "maxiter": 600,
                                "initial_simplex": simplex})
        x, z = res.x
        if z <= _MIN_Z or z > z_cap or abs(x - x0) > 2.0 * span:
            continue
        x, z = _newton_polish(layout, x, z)
        if not 0 < z <= z_cap:
            continue
        if _newton_step_length(layout, x, z) <= 1e-9 * z:
            ex, ez = _e_xz(layout, x, z)
            candidates.append((math.hypot(ex, ez), x, z))
    if not candidates:
        raise NoTrapError("no interior RF null found from any start height")
    _, x, z = min(candidates)
    pos = np.array([x, layout.axial_center, z])
    return TrapSolution(null_position=pos, height=z)


# ---------------------------------------------------------------------------
# secular spectrum
# ---------------------------------------------------------------------------


def hessian_3pt(func, point, step: float, richardson: bool = True) -> np.ndarray:
    """Symmetric 3x3 second-difference Hessian, optionally Richardson refined."""

    def raw(h):
        p = np.asarray(point, dtype=float)
        H = np.empty((3, 3))
        f0 = func(p)
        for i in range(3):
            ei = np.zeros(3)
            ei[i] = h
            H[i, i] = (func(p + ei) - 2.0 * f0 + func(p - ei)) / h**2
            for j in range(i + 1, 3):
                ej = np.zeros(3)
                ej[j] = h
                H[i, j] = H[j, i] = (func(p + ei + ej) - func(p + ei - ej)
                                     - func(p - ei + ej) + func(p - ei - ej)) / (4.0 * h * h)
        return H

    if not richardson:
        return raw(step)
    return (4.0 * raw(0.5 * step) - raw(step)) / 3.0


@dataclass(frozen=True)
class TrapSolution:
    """RF null location plus (when solved) the secular motion around it."""

    null_position: np.ndarray = field(repr=False)
    height: float
    secular_freqs_hz: tuple | None = None
    axes: np.ndarray | None = field(default=None, repr=False)
    q_params: tuple | None = None
    trap_depth_ev: float | None = None
    unstable_axes: tuple = ()

    @property
    def stable(self) -> bool:
        return not self.unstable_axes


def _trap_depth_ev(layout, species, null, height, n_rays: int = 64,
                   n_samples: int = 400, reach: float = 30.0) -> float:
    """Lowest escape barrier of the pseudopotential along transverse rays, in eV.

    Marches each ray in the x-z plane outward to ``reach`` heights; a ray whose
    maximum sits at the end of its range (still climbing, e.g. toward the chip
    plane) offers no escape path and is skipped.
    """
    psi0 = pseudopotential(layout, species, null, step=height * _FD_SCALE)
    s = np.geomspace(1e-2 * height, reach * height, n_samples)
    best = math.inf
    for theta in np.linspace(0.0, 2.0 * math.pi, n_rays, endpoint=False):
        dx, dz = math.cos(theta), math.sin(theta)
        px = null[0] + s * dx
        pz = null[2] + s * dz
        ok = pz > 10.0 * _MIN_Z
        if ok.sum() < 4:
            continue
        psi = _psi_batch(layout, species, px[ok], np.full(ok.sum(), null[1]), pz[ok],
                         height * _FD_SCALE)
        imax = int(np.argmax(psi))
        if imax >= psi.size - 1:
            continue
        best = min(best, float(psi[imax]) - psi0)
    return best / CONSTANTS.elementary_charge if math.isfinite(best) else math.inf


def secular_spectrum(layout: ElectrodeLayout, species: IonSpecies = CA40,
                     dc_voltages: Mapping[int, float] | None = None) -> TrapSolution:
    """Secular frequencies, axes, Mathieu q and depth at the RF null.

    The total effective potential (pseudopotential plus charge times the DC
    solution) is differentiated numerically with step height/1e4 and one
    Richardson refinement.  A negative Hessian eigenvalue marks the axis
    unstable (frequency reported as 0) rather than raising.
    """
    sol = find_rf_null(layout, species)
    h = sol.height
    step = h * _FD_SCALE
    q_ion = species.charge_c

    def total_energy(p):
        return (pseudopotential(layout, species, p, step=step)
                + q_ion * dc_potential(layout, dc_voltages, p))

    H = hessian_3pt(total_energy, sol.null_position, step)
    evals, axes = np.linalg.eigh(H)
    scale = float(np.linalg.norm(H))
    unstable = tuple(int(i) for i, ev in enumerate(evals) if ev < -1e-9 * scale)
    freqs = tuple(math.sqrt(max(float(ev), 0.0) / species.mass_kg) / (2.0 * math.pi)
                  for ev in evals)

    def rf_energy(p):
        return pseudopotential(layout, species, p, step=step)

    H_rf = hessian_3pt(rf_energy, sol.null_position, step)
    rf_evals = np.linalg.eigvalsh(H_rf)
    q_params = tuple(2.0 * math.sqrt(2.0) * math.sqrt(max(float(ev), 0.0) / species.mass_kg)
                     / layout.rf_omega for ev in rf_evals)

    depth = _trap_depth_ev(layout, species, sol.null_position, h)
    return TrapSolution(null_position=sol.null_position, height=h,
                        secular_freqs_hz=freqs, axes=axes, q_params=q_params,
                        trap_depth_ev=depth, unstable_axes=unstable)


# ---------------------------------------------------------------------------
# lumped resonator and ion-crystal helpers
# ---------------------------------------------------------------------------


def resonator_capacitance(inductance_h: float, resonance_hz: float) -> float:
    """Load capacitance of an LC resonator: C = 1/(L*(2*pi*f0)^2)."""
    if inductance_h <= 0 or resonance_hz <= 0:
        raise DomainError("inductance and resonance frequency must be positive")
    return 1.0 / (inductance_h * (2.0 * math.pi * resonance_hz) ** 2)


def resonance_frequency(inductance_h: float, capacitance_f: float) -> float:
    """f0 = 1/(2*pi*sqrt(L*C))."""
    if inductance_h <= 0 or capacitance_f <= 0:
        raise DomainError("inductance and capacitance must be positive")
    return 1.0 / (2.0 * math.pi * math.sqrt(inductance_h * capacitance_f))


def two_ion_spacing(species: IonSpecies, secular_frequency_hz: float) -> float:
    """Equilibrium spacing of two ions sharing a harmonic well, in m.

    Balance of Coulomb repulsion and restoring force:
    s = (q^2 / (2*pi*eps0*m*omega^2))^(1/3).
    """
    f = float(secular_frequency_hz)
    if f <= 0:
        raise DomainError("secular frequency must be positive")
    omega = 2.0 * math.pi * f
    s3 = species.charge_c**2 / (2.0 * math.pi * CONSTANTS.eps0 * species.mass_kg * omega**2)
    return s3 ** (1.0 / 3.0)


# ---------------------------------------------------------------------------
# canonical five-wire builder and plain-text layout files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiveWireGeometry:
    """Physical cross-section parameters of the symmetric five-wire builder."""

    center_half_width: float
    rail_width: float
    gap: float
    dc_width: float
    length: float
    gaps_assigned: bool

    def ion_edge_distance(self, height: float) -> float:
        """Distance from a point at ``height`` above the axis to the nearest
        exposed electrode edge (the center electrode edge at x = +/- half width)."""
        return math.hypot(height, self.center_half_width)


def five_wire_layout(center_half_width: float, rail_width: float = 60e-6,
                     gap: float = 10e-6, dc_width: float = 200e-6,
                     length: float = 6e-3, rf_voltage: float = 120.0,
                     rf_omega: float = 2.0 * math.pi * 49.9e6,
                     dc_segments: int = 1, assign_gaps: bool = True):
    """Symmetric cross-section: DC | gap | RF | gap | center | gap | RF | gap | DC.

    In the gapless model each gap is split half-half between its neighbours
    (``assign_gaps=True``), so the modeled RF rail spans
    [g + gap/2, g + 1.5*gap + rail_width] with g the center half width.
    Returns (ElectrodeLayout, FiveWireGeometry).
    """
    g, wg, wr, wd = center_half_width, gap, rail_width, dc_width
    if min(g, wg, wr, wd, length) <= 0:
        raise DomainError("all five-wire dimensions must be positive")
    half_len = 0.5 * length
    if assign_gaps:
        center_edge = g + 0.5 * wg
        rf_in, rf_out = g + 0.5 * wg, g + 1.5 * wg + wr
        dc_in, dc_out = g + 1.5 * wg + wr, g + 2.0 * wg + wr + wd
    else:
        center_edge = g
        rf_in, rf_out = g + wg, g + wg + wr
        dc_in, dc_out = g + 2.0 * wg + wr, g + 2.0 * wg + wr + wd
    strips = [Strip(-center_edge, center_edge, -half_len, half_len, ROLE_CENTER),
              Strip(rf_in, rf_out, -half_len, half_len, ROLE_RF),
              Strip(-rf_out, -rf_in, -half_len, half_len, ROLE_RF)]
    edges = np.linspace(-half_len, half_len, dc_segments + 1)
    for k in range(dc_segments):
        strips.append(Strip(dc_in, dc_out, edges[k], edges[k + 1], ROLE_DC, dc_index=k))
        strips.append(Strip(-dc_out, -dc_in, edges[k], edges[k + 1], ROLE_DC,
                            dc_index=dc_segments + k))
    layout = ElectrodeLayout(strips=tuple(strips), rf_voltage=rf_voltage, rf_omega=rf_omega)
    geom = FiveWireGeometry(center_half_width=g, rail_width=wr, gap=wg, dc_width=wd,
                            length=length, gaps_assigned=assign_gaps)
    return layout, geom


_TRAP_KEYS = {"rf_voltage", "rf_frequency", "species"}
_STRIP_KEYS = {"role", "x_min", "x_max", "y_min", "y_max", "dc_index"}


def load_layout(path) -> tuple[ElectrodeLayout, IonSpecies]:
    """Read a layout from an INI-style file.

    One ``[trap]`` section (rf_voltage, rf_frequency in Hz, optional species)
    and one ``[strip <name>]`` section per electrode with role and extents.
    Values may carry unit suffixes ("60um", "49.9MHz").  Unknown sections or
    keys are rejected.
    """
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read layout file {path!r}")
    if "trap" not in cp:
        raise ConfigError("layout file needs a [trap] section")
    trap = cp["trap"]
    unknown = set(trap) - _TRAP_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in [trap]: {sorted(unknown)}")
    try:
        rf_voltage = parse_quantity(trap["rf_voltage"]).value
        rf_omega = 2.0 * math.pi * parse_quantity(trap["rf_frequency"]).value
    except KeyError as exc:
        raise ConfigError(f"[trap] is missing {exc}") from exc
    species = SPECIES.get(trap.get("species", "Ca40"))
    if species is None:
        raise ConfigError(f"unknown species {trap.get('species')!r}")

    strips = []
    for name in cp.sections():
        if name == "trap":
            continue
        if not name.startswith("strip"):
            raise ConfigError(f"unknown section [{name}]")
        sec = cp[name]
        unknown = set(sec) - _STRIP_KEYS
        if unknown:
            raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")
        try:
            kwargs = {k: parse_quantity(sec[k]).value for k in ("x_min", "x_max", "y_min", "y_max")}
            role = sec["role"].strip()
        except KeyError as exc:
            raise ConfigError(f"[{name}] is missing {exc}") from exc
        idx = sec.get("dc_index")
        try:
            strips.append(Strip(role=role, dc_index=int(idx) if idx is not None else None,
                                **kwargs))
        except DomainError as exc:
            raise ConfigError(f"[{name}]: {exc}") from exc
    try:
        layout = ElectrodeLayout(strips=tuple(strips), rf_voltage=rf_voltage, rf_omega=rf_omega)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return layout, species
