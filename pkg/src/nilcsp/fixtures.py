"""Named presentations used throughout the tests and the CLI."""
from __future__ import annotations

from .pcgroup import PcPresentation


def heis(p: int | None = None) -> PcPresentation:
    """Discrete Heisenberg group; with ``p`` every generator gets order p."""
    return PcPresentation(
        [("x", 1, p), ("y", 1, p), ("z", 2, p)],
        {},
        [("x", "y", [("z", 1)])],
    )


def free_class2(rank: int) -> PcPresentation:
    """Free nilpotent group of class 2 on ``rank`` generators."""
    gens = [(f"x{i}", 1, None) for i in range(1, rank + 1)]
    comms = []
    for i in range(1, rank + 1):
        for j in range(i + 1, rank + 1):
            gens.append((f"c{i}{j}", 2, None))
            comms.append((f"x{i}", f"x{j}", [(f"c{i}{j}", 1)]))
    return PcPresentation(gens, {}, comms)


def f32() -> PcPresentation:
    return free_class2(3)


def f23() -> PcPresentation:
    """Free nilpotent group of class 3 on two generators."""
    return PcPresentation(
        [("x", 1, None), ("y", 1, None), ("c", 2, None), ("d", 3, None), ("e", 3, None)],
        {},
        [("x", "y", [("c", 1)]), ("c", "x", [("d", 1)]), ("c", "y", [("e", 1)])],
    )


def free_abelian(rank: int) -> PcPresentation:
    return PcPresentation([(f"t{i}", 1, None) for i in range(1, rank + 1)])


def cyclic(n: int) -> PcPresentation:
    return PcPresentation([("t", 1, n)])


def named(name: str) -> PcPresentation:
    """Look up a fixture by name: HEIS, HEIS2, HEIS3, ..., F32, F23, NG2, Z2, C6."""
    key = name.upper()
    if key == "HEIS":
        return heis()
    if key.startswith("HEIS") and key[4:].isdigit():
        return heis(int(key[4:]))
    if key == "F32":
        return f32()
    if key == "F23":
        return f23()
    if key.startswith("NG") and key[2:].isdigit():
        from .surface import class2_surface_group
        return class2_surface_group(int(key[2:]))
    if key.startswith("Z") and key[1:].isdigit():
        return free_abelian(int(key[1:]))
    if key.startswith("C") and key[1:].isdigit():
        return cyclic(int(key[1:]))
    raise KeyError(f"unknown fixture {name!r}")


FIXTURE_NAMES = ("HEIS", "HEIS2", "HEIS3", "F32", "F23", "NG2", "Z2")
