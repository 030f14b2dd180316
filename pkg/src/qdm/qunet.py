"""Bridged-MERA denoising network (QUNET).

The down path alternates a row of disentanglers (two-qubit "convolution"
blocks on staggered pairs of the active qubits) with a row of isometries
(pooling blocks on adjacent pairs, after which one qubit of each pair goes
idle). The up path repeats the same placements in reverse order with fresh
parameters. Pooled-out qubits are never reset or measured, so the whole
network is one unitary on a fixed register.
"""

from dataclasses import dataclass, field
from enum import Enum

from .circuit import Circuit, CircuitBuilder, GateInstance
from .gates import GateKind


class Role(str, Enum):
    DISENTANGLER = "disentangler"
    ISOMETRY = "isometry"


class Retention(str, Enum):
    # keep the second qubit of every pooled pair
    SECOND = "second"
    # keep the second qubit of even-numbered pairs and the first of odd ones;
    # the resulting interaction graph is a path plus rungs, so it embeds on a ladder
    ALTERNATE = "alternate"


_PAULI_COUPLINGS = {GateKind.RXX, GateKind.RYY, GateKind.RZZ}


@dataclass(frozen=True)
class BlockTemplate:
    role: Role
    recipe: tuple[tuple[GateKind, tuple[int, ...]], ...]

    def __post_init__(self):
        role = Role(self.role)
        recipe = tuple((GateKind(k), tuple(int(q) for q in qs)) for k, qs in self.recipe)
        object.__setattr__(self, "role", role)
        object.__setattr__(self, "recipe", recipe)
        for kind, qs in recipe:
            if kind in (GateKind.H, GateKind.X):
                raise ValueError(f"{kind.value} is reserved for state preparation, not network blocks")
            if len(qs) != kind.n_qubits or any(q not in (0, 1) for q in qs) or len(set(qs)) != len(qs):
                raise ValueError(f"bad relative qubits {qs} for {kind.value}")
        kinds = [k for k, _ in recipe]
        if role is Role.DISENTANGLER and not _PAULI_COUPLINGS.intersection(kinds):
            raise ValueError("a disentangler needs at least one of Rxx/Ryy/Rzz")
        if role is Role.ISOMETRY and kinds.count(GateKind.CNOT) != 1:
            raise ValueError("an isometry needs exactly one CNOT")

    @property
    def param_count(self) -> int:
        return sum(k.n_params for k, _ in self.recipe)

    def to_dict(self) -> dict:
        return {"role": self.role.value, "recipe": [[k.value, list(qs)] for k, qs in self.recipe]}

    @classmethod
    def from_dict(cls, d: dict) -> "BlockTemplate":
        return cls(Role(d["role"]), tuple((GateKind(k), tuple(qs)) for k, qs in d["recipe"]))


def default_templates() -> tuple[BlockTemplate, BlockTemplate]:
    """Disentangler with 7 angles and isometry with 3 (112 angles total at 8 qubits)."""
    dis = BlockTemplate(
        Role.DISENTANGLER,
        (
            (GateKind.RX, (0,)),
            (GateKind.RY, (0,)),
            (GateKind.RX, (1,)),
            (GateKind.RY, (1,)),
            (GateKind.RXX, (0, 1)),
            (GateKind.RYY, (0, 1)),
            (GateKind.RZZ, (0, 1)),
        ),
    )
    iso = BlockTemplate(
        Role.ISOMETRY,
        (
            (GateKind.RY, (0,)),
            (GateKind.RY, (1,)),
            (GateKind.CNOT, (0, 1)),
            (GateKind.RY, (1,)),
        ),
    )
    return dis, iso


@dataclass(frozen=True)
class LevelPlacement:
    active: tuple[int, ...]
    disentanglers: tuple[tuple[int, int], ...]
    # (pooled-out qubit, kept qubit); the template's relative qubit 1 is kept
    isometries: tuple[tuple[int, int], ...]

    @property
    def kept(self) -> tuple[int, ...]:
        return tuple(sorted(k for _, k in self.isometries))


@dataclass(frozen=True)
class Block:
    path: str  # "down" or "up"
    level: int
    role: Role
    index: int
    qubits: tuple[int, int]
    first_slot: int


@dataclass(frozen=True)
class QunetDescriptor:
    n_qubits: int
    levels: int
    disentangler: BlockTemplate
    isometry: BlockTemplate
    retention: Retention
    final_pair_disentangler: bool
    down: tuple[LevelPlacement, ...]
    blocks: tuple[Block, ...] = field(repr=False)
    # gate index just after each down level (where the optional noise block sits)
    level_ends: tuple[int, ...] = field(repr=False)
    down_gate_count: int = field(repr=False)

    @property
    def param_count(self) -> int:
        return sum(self._template(b.role).param_count for b in self.blocks)

    @property
    def bottleneck(self) -> int:
        return self.down[-1].kept[0]

    def _template(self, role: Role) -> BlockTemplate:
        return self.disentangler if role is Role.DISENTANGLER else self.isometry

    def param_layout(self) -> dict[tuple[str, int, str, int, int], int]:
        """(path, level, role, block index, recipe position) -> slot."""
        layout = {}
        for b in self.blocks:
            slot = b.first_slot
            for pos, (kind, _) in enumerate(self._template(b.role).recipe):
                if kind.n_params:
                    layout[(b.path, b.level, b.role.value, b.index, pos)] = slot
                    slot += 1
        return layout

    def block_counts(self) -> dict[str, int]:
        counts = {"disentangler": 0, "isometry": 0}
        for b in self.blocks:
            counts[b.role.value] += 1
        return counts

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "levels": self.levels,
            "templates": {"disentangler": self.disentangler.to_dict(), "isometry": self.isometry.to_dict()},
            "retention": self.retention.value,
            "final_pair_disentangler": self.final_pair_disentangler,
            "param_count": self.param_count,
        }


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and n & (n - 1) == 0


def down_placements(n_qubits: int, retention=Retention.ALTERNATE, final_pair_disentangler: bool = True):
    retention = Retention(retention)
    active = tuple(range(n_qubits))
    levels = []
    while len(active) > 1:
        m = len(active)
        dis = tuple((active[i], active[i + 1]) for i in range(1, m - 1, 2))
        if m == 2 and final_pair_disentangler:
            dis = ((active[0], active[1]),)
        iso = []
        for j in range(m // 2):
            a, b = active[2 * j], active[2 * j + 1]
            keep_first = retention is Retention.ALTERNATE and j % 2 == 1
            iso.append((b, a) if keep_first else (a, b))
        placement = LevelPlacement(active, dis, tuple(iso))
        levels.append(placement)
        active = placement.kept
    return tuple(levels)


def build_qunet(
    n_qubits: int,
    templates: tuple[BlockTemplate, BlockTemplate] | None = None,
    retention=Retention.ALTERNATE,
    final_pair_disentangler: bool = True,
) -> tuple[Circuit, QunetDescriptor]:
    """Build the network circuit (all parameters as slots) and its descriptor."""
    if not isinstance(n_qubits, int) or not _is_power_of_two(n_qubits):
        raise ValueError(f"n_qubits must be a power of two >= 2, got {n_qubits!r}")
    dis_t, iso_t = templates if templates is not None else default_templates()
    if Role(dis_t.role) is not Role.DISENTANGLER or Role(iso_t.role) is not Role.ISOMETRY:
        raise ValueError("templates must be (disentangler, isometry)")
    retention = Retention(retention)
    down = down_placements(n_qubits, retention, final_pair_disentangler)

    # placement-level sequence of the down path, then its mirror image
    seq = []
    for lvl, p in enumerate(down):
        seq += [("down", lvl, Role.DISENTANGLER, i, q) for i, q in enumerate(p.disentanglers)]
        seq += [("down", lvl, Role.ISOMETRY, i, q) for i, q in enumerate(p.isometries)]
    seq += [("up", lvl, role, i, q) for (_, lvl, role, i, q) in reversed(seq)]

    builder = CircuitBuilder(n_qubits)
    blocks, level_ends = [], []
    down_gates = 0
    for k, (path, lvl, role, idx, pair) in enumerate(seq):
        template = dis_t if role is Role.DISENTANGLER else iso_t
        blocks.append(Block(path, lvl, role, idx, pair, builder.param_count))
        for kind, rel in template.recipe:
            builder.add(kind, *(pair[r] for r in rel))
        nxt = seq[k + 1] if k + 1 < len(seq) else None
        if path == "down" and (nxt is None or nxt[0] != "down" or nxt[1] != lvl):
            level_ends.append(len(builder.gates))
        if path == "down":
            down_gates = len(builder.gates)

    circuit = builder.build()
    desc = QunetDescriptor(
        n_qubits=n_qubits,
        levels=len(down),
        disentangler=dis_t,
        isometry=iso_t,
        retention=retention,
        final_pair_disentangler=final_pair_disentangler,
        down=down,
        blocks=tuple(blocks),
        level_ends=tuple(level_ends),
        down_gate_count=down_gates,
    )
    return circuit, desc


def descriptor_from_dict(d: dict) -> tuple[Circuit, QunetDescriptor]:
    templates = (
        BlockTemplate.from_dict(d["templates"]["disentangler"]),
        BlockTemplate.from_dict(d["templates"]["isometry"]),
    )
    circuit, desc = build_qunet(
        int(d["n_qubits"]),
        templates,
        retention=d.get("retention", Retention.ALTERNATE.value),
        final_pair_disentangler=bool(d.get("final_pair_disentangler", True)),
    )
    if "param_count" in d and int(d["param_count"]) != desc.param_count:
        raise ValueError(f"descriptor declares {d['param_count']} parameters but rebuilds to {desc.param_count}")
    return circuit, desc


@dataclass(frozen=True)
class CouplingGraph:
    vertices: frozenset
    edges: frozenset  # of frozenset pairs

    def __post_init__(self):
        verts = frozenset(self.vertices)
        edges = frozenset(frozenset(e) for e in self.edges)
        for e in edges:
            if len(e) != 2:
                raise ValueError(f"self-loop or malformed edge {set(e)}")
            if not e <= verts:
                raise ValueError(f"edge {set(e)} references unknown vertices")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)

    def adjacent(self, u, v) -> bool:
        return frozenset((u, v)) in self.edges


def ladder_graph(rows: int = 2, cols: int = 4) -> CouplingGraph:
    """Grid of ``rows`` x ``cols`` with rail (in-row) and rung (in-column) edges; vertex r*cols + c."""
    verts = range(rows * cols)
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return CouplingGraph(frozenset(verts), frozenset(frozenset(e) for e in edges))


def complete_graph(n: int) -> CouplingGraph:
    return CouplingGraph(frozenset(range(n)), frozenset(frozenset((a, b)) for a in range(n) for b in range(a + 1, n)))


def snake_embedding(rows: int, cols: int) -> dict[int, int]:
    """Qubit order running along row 0, back along row 1, and so on."""
    emb = {}
    q = 0
    for r in range(rows):
        cs = range(cols) if r % 2 == 0 else range(cols - 1, -1, -1)
        for c in cs:
            emb[q] = r * cols + c
            q += 1
    return emb


def row_major_embedding(n_qubits: int) -> dict[int, int]:
    return {q: q for q in range(n_qubits)}


def validate_topology(descriptor, circuit: Circuit, graph: CouplingGraph, embedding: dict) -> list[GateInstance]:
    """Two-qubit gates whose embedded endpoints are not coupled in ``graph``."""
    if len(set(embedding.values())) != len(embedding):
        raise ValueError("embedding is not injective")
    n = descriptor.n_qubits if descriptor is not None else circuit.n_qubits
    missing = [q for q in range(n) if q not in embedding]
    if missing:
        raise ValueError(f"embedding misses qubits {missing}")
    unknown = [v for v in embedding.values() if v not in graph.vertices]
    if unknown:
        raise ValueError(f"embedding targets unknown vertices {unknown}")
    return [
        g
        for g in circuit.gates
        if len(g.qubits) == 2 and not graph.adjacent(embedding[g.qubits[0]], embedding[g.qubits[1]])
    ]
