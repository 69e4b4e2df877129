"""
Plain-text problem dump for debugging against external solvers.

Format (one record per line, 0-based indices, docs/formats.md):

    qtemporal-sdp 1
    sense <maximize|minimize>
    vars <m>
    constant <c0>
    blocks <n_1> ... <n_B>
    equalities <p>
    obj <k> <c_k>
    lmi <block> <mat> <i> <j> <re> <im>     mat 0 = F0, mat k+1 = F_k; i <= j
    eq <row> <k> <a_row_k>
    rhs <row> <beta_row>
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from qtemporal.sdp.problem import LmiBlock, SdpProblem

DUMP_HEADER = "qtemporal-sdp 1"


def _fmt(value: float) -> str:
    return repr(float(value))


def dump_problem(problem: SdpProblem, path: Path) -> None:
    lines = [
        DUMP_HEADER,
        f"sense {problem.sense}",
        f"vars {problem.n_vars}",
        f"constant {_fmt(problem.objective_constant)}",
        "blocks " + " ".join(str(block.size) for block in problem.blocks),
        f"equalities {len(problem.eq_rhs)}",
    ]
    for k in np.flatnonzero(problem.objective):
        lines.append(f"obj {k} {_fmt(problem.objective[k])}")

    for b, block in enumerate(problem.blocks):
        matrices = [(0, block.constant)] + [
            (int(vid) + 1, coefficients) for vid, coefficients in zip(block.var_ids, block.coefficients)
        ]
        for mat, matrix in matrices:
            rows, cols = np.nonzero(np.triu(matrix))
            for i, j in zip(rows, cols):
                entry = complex(matrix[i, j])
                lines.append(f"lmi {b} {mat} {i} {j} {_fmt(entry.real)} {_fmt(entry.imag)}")

    for row in range(len(problem.eq_rhs)):
        for k in np.flatnonzero(problem.eq_matrix[row]):
            lines.append(f"eq {row} {k} {_fmt(problem.eq_matrix[row, k])}")
        lines.append(f"rhs {row} {_fmt(problem.eq_rhs[row])}")

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_problem(path: Path) -> SdpProblem:
    header: dict[str, list[str]] = {}
    records: list[list[str]] = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        parts = raw.split()
        if not parts:
            continue
        if parts[0] in ("obj", "lmi", "eq", "rhs"):
            records.append(parts)
        else:
            header[parts[0]] = parts[1:]

    if header.get("qtemporal-sdp") != ["1"]:
        raise ValueError(f"{path}: not a version 1 problem dump")

    n_vars = int(header["vars"][0])
    sizes = [int(n) for n in header.get("blocks", [])]
    n_eq = int(header["equalities"][0])

    objective = np.zeros(n_vars)
    eq_matrix = np.zeros((n_eq, n_vars))
    eq_rhs = np.zeros(n_eq)
    matrices: list[dict[int, np.ndarray]] = [{} for _ in sizes]

    for parts in records:
        kind = parts[0]
        if kind == "obj":
            objective[int(parts[1])] = float(parts[2])
        elif kind == "eq":
            eq_matrix[int(parts[1]), int(parts[2])] = float(parts[3])
        elif kind == "rhs":
            eq_rhs[int(parts[1])] = float(parts[2])
        else:
            b, mat, i, j = (int(p) for p in parts[1:5])
            value = complex(float(parts[5]), float(parts[6]))
            matrix = matrices[b].setdefault(mat, np.zeros((sizes[b], sizes[b]), dtype=complex))
            matrix[i, j] = value
            matrix[j, i] = value.conjugate()

    blocks = []
    for b, size in enumerate(sizes):
        constant = matrices[b].pop(0, np.zeros((size, size), dtype=complex))
        ids = np.array(sorted(matrices[b]), dtype=int)
        coefficients = (
            np.stack([matrices[b][int(k)] for k in ids])
            if len(ids)
            else np.zeros((0, size, size), dtype=complex)
        )
        blocks.append(LmiBlock(constant=constant, var_ids=ids - 1, coefficients=coefficients, label=f"block{b}"))

    return SdpProblem(
        n_vars=n_vars,
        objective=objective,
        blocks=tuple(blocks),
        eq_matrix=eq_matrix,
        eq_rhs=eq_rhs,
        sense=header["sense"][0],
        objective_constant=float(header["constant"][0]),
    )
