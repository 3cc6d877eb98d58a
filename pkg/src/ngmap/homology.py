"""Integer homology of generalized maps via Smith normal form.

The chain complex of a map has one free generator per cell; boundary
coefficients are the signed incidence numbers read off the dart signs.
Homology groups are computed dimension by dimension: the kernel of each
boundary map in Smith-form coordinates, then the image of the next map
expressed inside that kernel, giving Betti numbers, torsion coefficients
and (on request) explicit generator chains.

Generator chains computed on a simplified map can be transported back onto
the original map with project_generators, walking the operation log in
reverse; transport_chain pushes chains the other way.  Both directions use
only the incidences stored in the log, so they are exact on the chain
level, not merely up to homology.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import CellCatalog, DomainError, GMap
from .orientation import SignedGMap, assign_signs, boundary_partition
from .simplify import LogMismatch, OperationLog, PipelineError, fingerprint
from .smith import (
    identity,
    mat_mul,
    mat_vec,
    smith_normal_form,
    sparse_invariant_factors,
)


class BoundaryNotNilpotent(DomainError):
    """The composed boundary of the built complex was nonzero."""


@dataclass(frozen=True)
class ChainComplex:
    """Sparse integer chain complex over the cells of a map.

    basis[j] lists the j-cells; columns[j][k] is the boundary of the k-th
    j-cell as {index of (j-1)-cell: coefficient} (empty for j = 0).
    """

    dimension: int
    basis: list
    columns: list
    fingerprint: str

    def counts(self) -> list:
        return [len(b) for b in self.basis]


def build_chain_complex(signed, catalog: CellCatalog | None = None) -> ChainComplex:
    """Boundary matrices of a (signed) map; checks that they compose to zero."""
    if not isinstance(signed, SignedGMap):
        signed = assign_signs(signed, catalog)
    g = signed.base
    catalog = catalog or g.all_cells()
    basis = [list(catalog.cells(j)) for j in range(g.dimension + 1)]
    columns = [[{} for _ in basis[0]]] if basis else []
    for j in range(1, g.dimension + 1):
        cols = []
        for cell in basis[j]:
            col: dict = {}
            for cls in boundary_partition(g, cell.canonical_dart, j):
                rep = cls[0]
                row = catalog.index_of(j - 1, rep)
                col[row] = col.get(row, 0) + signed.sign(j, rep) * signed.sign(j - 1, rep)
            cols.append({r: v for r, v in col.items() if v})
        columns.append(cols)
    for j in range(2, g.dimension + 1):
        for k, col in enumerate(columns[j]):
            acc: dict = {}
            for r, v in col.items():
                for r2, v2 in columns[j - 1][r].items():
                    acc[r2] = acc.get(r2, 0) + v * v2
            bad = {r: v for r, v in acc.items() if v}
            if bad:
                raise BoundaryNotNilpotent(
                    f"boundary of boundary is nonzero on {j}-cell {k}: {bad}"
                )
    return ChainComplex(
        dimension=g.dimension,
        basis=basis,
        columns=columns,
        fingerprint=fingerprint(g),
    )


@dataclass(frozen=True)
class GeneratorChain:
    """One homology generator: a cycle with cells keyed by canonical dart.

    order is 0 for a free generator, otherwise the torsion coefficient.
    """

    dim: int
    order: int
    support: dict

    def __post_init__(self):
        if not self.support:
            raise ValueError("a generator chain cannot be empty")


@dataclass(frozen=True)
class HomologyResult:
    dimension: int
    betti: list
    torsion: list
    fingerprint: str
    generators: list | None = None

    def group(self, p: int) -> str:
        """Human-readable description of the p-th homology group."""
        parts = ["Z"] * self.betti[p] + [f"Z/{t}" for t in self.torsion[p]]
        return " + ".join(parts) if parts else "0"


def _dense(columns, num_rows: int, num_cols: int):
    mat = [[0] * num_cols for _ in range(num_rows)]
    for k, col in enumerate(columns):
        for r, v in col.items():
            mat[r][k] = v
    return mat


def _columns_of(mat, picks) -> list:
    return [[row[k] for k in picks] for row in mat]


def homology(cc: ChainComplex, generators: bool = False) -> HomologyResult:
    """Betti numbers and torsion coefficients of a chain complex.

    Without generators only the invariant factors of each boundary matrix
    are computed, on the sparse fast path.  With generators the full
    transform-tracking Smith form runs and the result carries one explicit
    cycle per homology generator.
    """
    n = cc.dimension
    counts = cc.counts()
    ranks = [0] * (n + 2)
    factors = [[] for _ in range(n + 2)]
    for p in range(1, n + 1):
        ranks[p], factors[p] = sparse_invariant_factors(cc.columns[p], counts[p - 1])
    betti = [counts[p] - ranks[p] - ranks[p + 1] for p in range(n + 1)]
    torsion = [[f for f in factors[p + 1] if f > 1] for p in range(n + 1)]
    if not generators:
        return HomologyResult(
            dimension=n, betti=betti, torsion=torsion, fingerprint=cc.fingerprint
        )

    gens: list = [[] for _ in range(n + 1)]
    for p in range(n + 1):
        n_p = counts[p]
        if n_p == 0:
            continue
        if p == 0 or counts[p - 1] == 0:
            kernel = identity(n_p)
            rank_p = 0
        else:
            sf = smith_normal_form(_dense(cc.columns[p], counts[p - 1], n_p))
            rank_p = sf.rank
            kernel = _columns_of(sf.V, range(rank_p, n_p))
        z_p = n_p - rank_p
        if z_p == 0:
            continue
        # image of the next boundary map, in kernel coordinates
        if p < n and counts[p + 1] > 0:
            m_next = _dense(cc.columns[p + 1], n_p, counts[p + 1])
            if p == 0 or counts[p - 1] == 0:
                coords = m_next
            else:
                coords = mat_mul(sf.V_inv, m_next)
            quotient = [coords[r] for r in range(rank_p, n_p)]
            qf = smith_normal_form(quotient)
            s = qf.rank
            diag = qf.diagonal
            basis_change = mat_mul(kernel, qf.U_inv)
        else:
            s = 0
            diag = []
            basis_change = kernel
        assert betti[p] == z_p - s, "dense and sparse ranks disagree"
        assert torsion[p] == [d for d in diag if d > 1], (
            "dense and sparse torsion disagree"
        )
        boundary = (
            _dense(cc.columns[p], counts[p - 1], n_p) if p > 0 and counts[p - 1] else None
        )
        for k in range(z_p):
            if k < s and diag[k] <= 1:
                continue
            vec = [row[k] for row in basis_change]
            if boundary is not None:
                assert not any(mat_vec(boundary, vec)), "generator is not a cycle"
            support = {
                cc.basis[p][idx].canonical_dart: v for idx, v in enumerate(vec) if v
            }
            order = diag[k] if k < s else 0
            gens[p].append(GeneratorChain(dim=p, order=order, support=support))
    return HomologyResult(
        dimension=n,
        betti=betti,
        torsion=torsion,
        fingerprint=cc.fingerprint,
        generators=gens,
    )


def homology_of_map(g, generators: bool = False) -> HomologyResult:
    """Convenience: signs, chain complex and homology of a map in one call."""
    signed = g if isinstance(g, SignedGMap) else assign_signs(g)
    return homology(build_chain_complex(signed), generators=generators)


# -- transporting chains through an operation log ----------------------------


def _project_chain(chain: dict, dim: int, log: OperationLog) -> dict:
    """Pull a chain (pipeline cell keys) back through all logged operations."""
    out = dict(chain)
    for rec in reversed(log.records):
        if rec.kind == "removal":
            if dim == rec.merged_dim and rec.merged_kept_key in out:
                coef = out[rec.merged_kept_key]
                extra = -coef * rec.inc_kept * rec.inc_dropped
                out[rec.merged_dropped_key] = out.get(rec.merged_dropped_key, 0) + extra
        elif rec.kind == "contraction":
            if dim == rec.dim and out:
                row = dict(rec.dropped_coboundary)
                delta = sum(
                    coef * row[key] for key, coef in out.items() if key in row
                )
                if delta:
                    out[rec.cell_key] = out.get(rec.cell_key, 0) - delta * rec.inc_dropped
        out = {k: v for k, v in out.items() if v}
    return out


def project_generators(
    result: HomologyResult, log: OperationLog, original: GMap
) -> list:
    """Carry the generators of a simplified map back onto the original map.

    The result must have been computed with generators=True on the final
    map of the log; fingerprints of both ends are verified.  Returns the
    generators in the same per-dimension layout, with supports keyed by
    canonical darts of the original map's cells.
    """
    if result.generators is None:
        raise ValueError("homology result carries no generators")
    if result.fingerprint != log.final_fingerprint:
        raise LogMismatch("homology result was computed on a different map")
    if fingerprint(original) != log.initial_fingerprint:
        raise LogMismatch("log was recorded on a different initial map")
    projected: list = [[] for _ in range(result.dimension + 1)]
    for p, chains in enumerate(result.generators):
        key_of = log.final_cell_keys[p]
        for chain in chains:
            keyed = {key_of[can]: coef for can, coef in chain.support.items()}
            back = _project_chain(keyed, p, log)
            if not back:
                raise PipelineError("projected generator vanished on the chain level")
            projected[p].append(
                GeneratorChain(dim=p, order=chain.order, support=back)
            )
    return projected


def transport_chain(chain: dict, dim: int, log: OperationLog) -> dict:
    """Push a chain of the original map forward through the log.

    The chain is keyed by canonical darts of original cells; the result is
    keyed by canonical darts of the final map's cells.  Raises when the
    chain touches a cell whose forward image is not recorded (the operated
    cell of a removal, or any collapsed cell).
    """
    out = {k: v for k, v in chain.items() if v}
    for pos, rec in enumerate(log.records):
        if rec.kind == "removal":
            if dim == rec.dim and rec.cell_key in out:
                raise DomainError(
                    f"record {pos}: forward image of removed cell "
                    f"{rec.cell_key} is not recorded"
                )
            if dim == rec.merged_dim:
                out.pop(rec.merged_dropped_key, None)
        elif rec.kind == "contraction":
            if dim == rec.dim:
                out.pop(rec.cell_key, None)
            if dim == rec.merged_dim and rec.merged_dropped_key in out:
                coef = out.pop(rec.merged_dropped_key)
                extra = -coef * rec.inc_dropped * rec.inc_kept
                cur = out.get(rec.merged_kept_key, 0) + extra
                if cur:
                    out[rec.merged_kept_key] = cur
                else:
                    out.pop(rec.merged_kept_key, None)
        else:
            for cdim, lower_key, upper_key, _ in rec.collapsed_cells:
                if dim == cdim and lower_key in out:
                    raise DomainError(
                        f"record {pos}: forward image of collapsed cell "
                        f"{lower_key} is not recorded"
                    )
                if dim == cdim + 1:
                    out.pop(upper_key, None)
    final_of = {key: can for can, key in log.final_cell_keys[dim].items()}
    missing = sorted(k for k in out if k not in final_of)
    if missing:
        raise DomainError(
            f"chain keys {missing} are not {dim}-cells of the final map"
        )
    return {final_of[k]: v for k, v in out.items()}
