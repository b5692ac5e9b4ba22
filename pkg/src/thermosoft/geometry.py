"""Structured-grid half-model of the pressure-temperature sensor assembly.

The assembly is meshed as a 2-D grid in the symmetry plane (uniform
out-of-plane depth): a metal fitting sitting on the tube wall, a blind
drill hole on the symmetry axis filled with air, an air gap above the
fitting, and a circuit board on top.  The mirror symmetry of the device
lets us model one half with an adiabatic symmetry plane.

Geometry is deliberately configuration, not truth: the real device's
dimensions are not public, so the defaults are plausible values for a
screw-in automotive sensor and live in the checked-in config file.

Grid convention: cell (iz, ix), ix = 0 on the symmetry axis, iz = 0 at the
medium-wetted bottom; node index = iz * nx + ix; cell centers at
((ix + 0.5) h, (iz + 0.5) h).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ValidationFailure
from .network import SIGMA, Material, ThermalNetwork

TAG_SYMMETRY = "adiabatic_symmetry"
TAG_MEDIUM = "convective_medium"
TAG_AMBIENT = "convective_ambient_with_radiation"
TAGS = (TAG_SYMMETRY, TAG_MEDIUM, TAG_AMBIENT)

SIDES = ("left", "right", "bottom", "top")

SENSOR_NAMES = ("t1", "t2", "t3", "t4", "t5", "t6")

PROBE_REGIONS = ("hole", "board")


class InvalidParams(ValidationFailure):
    """An assembly parameter violates its constraint; the message names it."""


class UnknownMaterial(ValidationFailure):
    pass


@dataclass(frozen=True)
class AssemblyParams:
    """Dimensions, material assignment, and film coefficients (SI units)."""

    tube_wall_thickness: float = 1.5e-3
    fitting_height: float = 12.0e-3
    fitting_width: float = 10.0e-3
    drill_hole_depth: float = 6.0e-3
    drill_hole_diameter: float = 2.0e-3
    board_offset: float = 2.0e-3     # air gap between fitting top and board
    board_thickness: float = 1.0e-3
    cell_size: float = 0.25e-3
    out_of_plane_depth: float = 10.0e-3
    material_metal: str = "steel"
    material_board: str = "fr4"
    material_air: str = "air"
    h_medium: float = 1000.0   # W/(m^2 K), forced refrigerant flow
    h_ambient: float = 10.0    # W/(m^2 K), still air


@dataclass(frozen=True)
class ProbeSpec:
    """Probe placement: a region and a relative position within it.

    For "hole": frac runs from 0 (hole bottom, nearest the medium) to 1
    (hole top), on the symmetry axis.  For "board": frac runs from 0
    (symmetry axis) to 1 (outer edge), at mid board thickness.
    """

    region: str
    frac: float

    def __post_init__(self):
        if self.region not in PROBE_REGIONS:
            raise InvalidParams(f"probe region must be one of {PROBE_REGIONS}, got {self.region!r}")
        if not 0.0 <= self.frac <= 1.0:
            raise InvalidParams(f"probe frac must be in [0, 1], got {self.frac}")


DEFAULT_PROBES: dict[str, ProbeSpec] = {
    "t1": ProbeSpec("hole", 0.0),
    "t2": ProbeSpec("hole", 0.5),
    "t3": ProbeSpec("hole", 1.0),
    "t4": ProbeSpec("board", 0.0),
    "t5": ProbeSpec("board", 0.5),
    "t6": ProbeSpec("board", 1.0),
}


@dataclass(frozen=True)
class SensorLayout:
    """The six candidate probes resolved to node indices."""

    specs: Mapping[str, ProbeSpec]
    nodes: Mapping[str, int]

    def __post_init__(self):
        if tuple(sorted(self.nodes)) != tuple(sorted(SENSOR_NAMES)):
            raise InvalidParams(f"layout must name exactly {SENSOR_NAMES}")
        if len(set(self.nodes.values())) != len(SENSOR_NAMES):
            raise InvalidParams("probe node indices must be distinct")

    def readings(self, temperatures: np.ndarray) -> dict[str, float]:
        return {name: float(temperatures[self.nodes[name]]) for name in SENSOR_NAMES}


@dataclass(frozen=True)
class GridGeometry:
    """Material grid plus boundary tagging of every exterior face."""

    nx: int
    nz: int
    cell_size: float
    out_of_plane_depth: float
    materials: tuple        # material names; cell values index into this
    material_id: np.ndarray  # (nz, nx) int
    face_tags: Mapping      # (iz, ix, side) -> tag, exterior faces only

    def __post_init__(self):
        ids = np.asarray(self.material_id, dtype=int)
        ids.setflags(write=False)
        object.__setattr__(self, "material_id", ids)
        object.__setattr__(self, "face_tags", dict(self.face_tags))

    @property
    def node_count(self) -> int:
        return self.nx * self.nz

    def node_index(self, iz: int, ix: int) -> int:
        return iz * self.nx + ix

    def cell_center(self, iz: int, ix: int) -> tuple[float, float]:
        return ((ix + 0.5) * self.cell_size, (iz + 0.5) * self.cell_size)

    def material_name(self, iz: int, ix: int) -> str:
        return self.materials[self.material_id[iz, ix]]

    def exterior_faces(self):
        """Yield (iz, ix, side) for every face on the grid boundary."""
        for iz in range(self.nz):
            yield (iz, 0, "left")
            yield (iz, self.nx - 1, "right")
        for ix in range(self.nx):
            yield (0, ix, "bottom")
            yield (self.nz - 1, ix, "top")


def _segment_cells(length: float, cell: float, label: str) -> int:
    """Number of cells covering a region segment; the cell size must divide
    the segment within 1%."""
    n = int(round(length / cell))
    if n < 1:
        raise InvalidParams(
            f"cell_size {cell} is too coarse for {label} = {length} (needs >= 1 cell)"
        )
    if abs(n * cell - length) > 0.01 * length:
        raise InvalidParams(
            f"cell_size {cell} does not divide {label} = {length} within 1%"
        )
    return n


def _check_params(p: AssemblyParams) -> None:
    lengths = {
        "tube_wall_thickness": p.tube_wall_thickness,
        "fitting_height": p.fitting_height,
        "fitting_width": p.fitting_width,
        "drill_hole_depth": p.drill_hole_depth,
        "drill_hole_diameter": p.drill_hole_diameter,
        "board_offset": p.board_offset,
        "board_thickness": p.board_thickness,
        "cell_size": p.cell_size,
        "out_of_plane_depth": p.out_of_plane_depth,
    }
    for name, value in lengths.items():
        if value <= 0:
            raise InvalidParams(f"{name} must be > 0, got {value}")
    if p.drill_hole_depth >= p.fitting_height:
        raise InvalidParams("drill_hole_depth must be smaller than fitting_height")
    if p.fitting_height - p.drill_hole_depth <= p.tube_wall_thickness:
        raise InvalidParams("drill hole must not reach into the tube wall")
    if p.cell_size > p.drill_hole_diameter:
        raise InvalidParams("cell_size must not exceed drill_hole_diameter")
    if p.h_medium <= 0 or p.h_ambient <= 0:
        raise InvalidParams("film coefficients must be > 0")


def build_halfmodel(params: AssemblyParams, materials: Mapping[str, Material],
                    probes: Mapping[str, ProbeSpec] = None,
                    ) -> tuple[GridGeometry, ThermalNetwork, SensorLayout]:
    """Mesh the half assembly, assemble its thermal network, place probes."""
    _check_params(params)
    probes = dict(DEFAULT_PROBES if probes is None else probes)
    for role, name in (("metal", params.material_metal),
                       ("board", params.material_board),
                       ("air", params.material_air)):
        if name not in materials:
            raise UnknownMaterial(f"{role} material {name!r} not in catalog")

    h = params.cell_size
    # vertical stack (bottom up) and horizontal split (axis out)
    n_wall = _segment_cells(params.tube_wall_thickness, h, "tube_wall_thickness")
    n_below_hole = _segment_cells(
        params.fitting_height - params.drill_hole_depth - params.tube_wall_thickness,
        h, "metal between tube wall and hole bottom")
    n_hole = _segment_cells(params.drill_hole_depth, h, "drill_hole_depth")
    n_gap = _segment_cells(params.board_offset, h, "board_offset")
    n_board = _segment_cells(params.board_thickness, h, "board_thickness")
    n_hole_x = _segment_cells(params.drill_hole_diameter / 2.0, h, "drill hole radius")
    half_width = params.fitting_width / 2.0
    n_metal_x = _segment_cells(half_width - n_hole_x * h, h, "metal beside the hole")

    nx = n_hole_x + n_metal_x
    nz = n_wall + n_below_hole + n_hole + n_gap + n_board

    names = (params.material_metal, params.material_board, params.material_air)
    id_metal, id_board, id_air = 0, 1, 2

    grid = np.full((nz, nx), id_metal, dtype=int)
    z_hole0 = n_wall + n_below_hole
    z_fit_top = z_hole0 + n_hole
    z_board0 = z_fit_top + n_gap
    grid[z_hole0:z_fit_top, :n_hole_x] = id_air       # drill hole
    grid[z_fit_top:z_board0, :] = id_air              # air gap under the board
    grid[z_board0:, :] = id_board                     # circuit board

    face_tags = {}
    for iz in range(nz):
        face_tags[(iz, 0, "left")] = TAG_SYMMETRY
        face_tags[(iz, nx - 1, "right")] = TAG_AMBIENT
    for ix in range(nx):
        face_tags[(0, ix, "bottom")] = TAG_MEDIUM
        face_tags[(nz - 1, ix, "top")] = TAG_AMBIENT

    geom = GridGeometry(nx=nx, nz=nz, cell_size=h,
                        out_of_plane_depth=params.out_of_plane_depth,
                        materials=names, material_id=grid, face_tags=face_tags)
    net = network_from_grid(geom, materials, params.h_medium, params.h_ambient)

    nodes = {}
    for name, spec in probes.items():
        if spec.region == "hole":
            iz = z_hole0 + int(round(spec.frac * (n_hole - 1)))
            nodes[name] = geom.node_index(iz, 0)
        else:
            iz = z_board0 + n_board // 2
            ix = int(round(spec.frac * (nx - 1)))
            nodes[name] = geom.node_index(iz, ix)
    layout = SensorLayout(specs=probes, nodes=nodes)
    return geom, net, layout


def network_from_grid(geom: GridGeometry, materials: Mapping[str, Material],
                      h_medium: float, h_ambient: float) -> ThermalNetwork:
    """Assemble the lumped network of a tagged material grid.

    Conduction between adjacent cell centers uses the series (harmonic)
    combination of the two half-cells, G = A / (h/2k1 + h/2k2); capacitance
    is rho * c_p * V per cell.  Tagged exterior faces become reservoir
    couplings; symmetry faces get none.
    """
    for name in geom.materials:
        if name not in materials:
            raise UnknownMaterial(f"material {name!r} not in catalog")
    mats = [materials[name] for name in geom.materials]
    k = np.array([m.conductivity for m in mats])[geom.material_id]
    rho_cp = np.array([m.density * m.specific_heat for m in mats])[geom.material_id]
    eps = np.array([m.emissivity for m in mats])[geom.material_id]

    h = geom.cell_size
    area = h * geom.out_of_plane_depth
    caps = (rho_cp * h * h * geom.out_of_plane_depth).ravel()

    links = []
    for iz in range(geom.nz):
        for ix in range(geom.nx):
            i = geom.node_index(iz, ix)
            if ix + 1 < geom.nx:
                g = area / (h / (2 * k[iz, ix]) + h / (2 * k[iz, ix + 1]))
                links.append((i, geom.node_index(iz, ix + 1), g))
            if iz + 1 < geom.nz:
                g = area / (h / (2 * k[iz, ix]) + h / (2 * k[iz + 1, ix]))
                links.append((i, geom.node_index(iz + 1, ix), g))

    convective, radiative = [], []
    for (iz, ix, side), tag in sorted(geom.face_tags.items()):
        node = geom.node_index(iz, ix)
        if tag == TAG_SYMMETRY:
            continue
        if tag == TAG_MEDIUM:
            convective.append((node, h_medium * area, "medium"))
        elif tag == TAG_AMBIENT:
            convective.append((node, h_ambient * area, "ambient"))
            e = eps[iz, ix]
            if e > 0:
                radiative.append((node, e * SIGMA * area, "ambient"))
        else:
            raise InvalidParams(f"unknown face tag {tag!r} on face ({iz}, {ix}, {side})")

    return ThermalNetwork(capacitances=caps, conductances=links,
                          convective=convective, radiative=radiative)


def validate(geom: GridGeometry, materials: Mapping[str, Material] = None) -> list[str]:
    """Collect invariant violations of a grid geometry; empty means valid.

    Never raises; meant for checking hand-built or imported geometries.
    """
    violations = []
    if geom.material_id.shape != (geom.nz, geom.nx):
        violations.append(
            f"material grid shape {geom.material_id.shape} does not match "
            f"(nz, nx) = ({geom.nz}, {geom.nx})")
        return violations

    n_ids = len(geom.materials)
    bad = np.flatnonzero((geom.material_id < 0) | (geom.material_id >= n_ids))
    for flat in bad:
        iz, ix = divmod(int(flat), geom.nx)
        violations.append(f"cell ({iz}, {ix}) has material id outside the catalog")
    if materials is not None:
        for name in geom.materials:
            if name not in materials:
                violations.append(f"material {name!r} not in catalog")

    exterior = set(geom.exterior_faces())
    for face in sorted(exterior):
        tag = geom.face_tags.get(face)
        if tag is None:
            violations.append(f"exterior face {face} is untagged")
        elif tag not in TAGS:
            violations.append(f"face {face} has unknown tag {tag!r}")
    for face, tag in sorted(geom.face_tags.items()):
        if face not in exterior:
            violations.append(f"tagged face {face} is not on the grid boundary")
    for iz in range(geom.nz):
        if geom.face_tags.get((iz, 0, "left")) not in (None, TAG_SYMMETRY):
            violations.append(
                f"symmetry plane face ({iz}, 0, 'left') must be tagged {TAG_SYMMETRY}")
    tags = set(geom.face_tags.values())
    if TAG_MEDIUM not in tags:
        violations.append("no medium-wetted face")
    if TAG_AMBIENT not in tags:
        violations.append("no ambient-exposed face")
    return violations


def mirror_geometry(geom: GridGeometry) -> GridGeometry:
    """Full model obtained by mirroring the half grid at the symmetry plane.

    The symmetry faces vanish (they become interior); every other exterior
    face keeps its tag on both halves.  Used to verify that the adiabatic
    half-model reproduces the mirrored full solution.
    """
    nx2 = 2 * geom.nx
    full = np.concatenate([geom.material_id[:, ::-1], geom.material_id], axis=1)

    def mirror_ix(ix):  # left half: ix_full = nx - 1 - ix ; right half: nx + ix
        return geom.nx - 1 - ix, geom.nx + ix

    face_tags = {}
    for (iz, ix, side), tag in geom.face_tags.items():
        if tag == TAG_SYMMETRY:
            continue
        left_ix, right_ix = mirror_ix(ix)
        if side in ("bottom", "top"):
            face_tags[(iz, right_ix, side)] = tag
            face_tags[(iz, left_ix, side)] = tag
        elif side == "right":
            face_tags[(iz, right_ix, "right")] = tag
            face_tags[(iz, left_ix, "left")] = tag
        else:  # a tagged non-symmetry left face mirrors to the outer right
            face_tags[(iz, right_ix, "left")] = tag
            face_tags[(iz, left_ix, "right")] = tag
    return GridGeometry(nx=nx2, nz=geom.nz, cell_size=geom.cell_size,
                        out_of_plane_depth=geom.out_of_plane_depth,
                        materials=geom.materials, material_id=full,
                        face_tags=face_tags)


def default_materials() -> dict[str, Material]:
    """Material catalog matching the checked-in default configuration."""
    return {
        "steel": Material("steel", conductivity=15.0, density=7900.0,
                          specific_heat=500.0, emissivity=0.3),
        "fr4": Material("fr4", conductivity=0.3, density=1850.0,
                        specific_heat=1100.0, emissivity=0.9),
        "air": Material("air", conductivity=0.026, density=1.2,
                        specific_heat=1005.0, emissivity=0.0),
    }
