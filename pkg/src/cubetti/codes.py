"""Neighborhood codes and vertex classes.

The eight unit cubes around a lattice vertex ``v`` are the octants ``t(s1,s2,s3)``
with ``s_k = 1`` for the ``+`` side and ``0`` for the ``-`` side of axis ``k``; the
octant has min corner ``v - 1 + s``. Octant occupancy is packed into a byte,
bit ``s1 + 2*s2 + 4*s3``.
"""

from __future__ import annotations

import enum
import itertools

import numpy as np

PERMUTATIONS = tuple(itertools.permutations(range(3)))


class VertexClass(enum.IntEnum):
    REGULAR = 0
    INDEX0 = 1
    INDEX1 = 2
    INDEX2 = 3
    MONKEY = 4
    FORBIDDEN = 5

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "VertexClass":
        for k, v in _LABELS.items():
            if v == label:
                return k
        raise ValueError(f"unknown vertex class label {label!r}")


_LABELS = {
    VertexClass.REGULAR: "regular",
    VertexClass.INDEX0: "index0",
    VertexClass.INDEX1: "index1",
    VertexClass.INDEX2: "index2",
    VertexClass.MONKEY: "monkey",
    VertexClass.FORBIDDEN: "forbidden",
}


def octant_signs(bit: int) -> tuple[int, int, int]:
    return (bit & 1, (bit >> 1) & 1, (bit >> 2) & 1)


def octant_bit(signs) -> int:
    return signs[0] + 2 * signs[1] + 4 * signs[2]


def octant_cube(vertex, bit: int) -> tuple[int, int, int]:
    """Index of the cube occupying octant ``bit`` around ``vertex``."""
    s = octant_signs(bit)
    return tuple(int(vertex[a]) - 1 + s[a] for a in range(3))  # type: ignore[return-value]


def permute_code(code: int, perm) -> int:
    """Relabel axes: the octant with signs ``s`` maps to signs ``(s[perm[0]], s[perm[1]], s[perm[2]])``."""
    out = 0
    for b in range(8):
        if code >> b & 1:
            s = octant_signs(b)
            out |= 1 << octant_bit([s[perm[a]] for a in range(3)])
    return out


def reverse_code(code: int) -> int:
    """Point reflection through the vertex: bit ``b`` moves to bit ``7 - b``."""
    out = 0
    for b in range(8):
        if code >> b & 1:
            out |= 1 << (7 - b)
    return out


def complement_code(code: int) -> int:
    return ~code & 0xFF


def _face_connected(cells: list[int]) -> bool:
    if not cells:
        return True
    seen = {cells[0]}
    stack = [cells[0]]
    members = set(cells)
    while stack:
        b = stack.pop()
        for a in range(3):
            nb = b ^ (1 << a)
            if nb in members and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)


def is_well_composed(code: int) -> bool:
    """True iff both the occupied and the vacant octants are face-connected.

    Failing codes are the local pictures of two cubes (occupied or vacant) that
    meet only along an edge or at the vertex.
    """
    occupied = [b for b in range(8) if code >> b & 1]
    vacant = [b for b in range(8) if not code >> b & 1]
    return _face_connected(occupied) and _face_connected(vacant)


def neighborhood_codes(occupancy: np.ndarray) -> np.ndarray:
    """Codes of every lattice vertex of a ``(Nx, Ny, Nz)`` occupancy array, shape ``(Nx+1, Ny+1, Nz+1)``."""
    occ = np.pad(np.asarray(occupancy, dtype=bool), 1)
    nx, ny, nz = (s - 1 for s in occ.shape)
    out = np.zeros((nx, ny, nz), dtype=np.uint8)
    for b in range(8):
        s1, s2, s3 = octant_signs(b)
        out |= occ[s1:s1 + nx, s2:s2 + ny, s3:s3 + nz].astype(np.uint8) << np.uint8(b)
    return out
