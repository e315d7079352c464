"""Configuration calculus and quantifier elimination for the theory of one
equivalence relation with at most one class of each finite size and
unboundedly many large classes.

The central object is the base-n configuration of a variable tuple: an
identity partition refined inside an E-partition, the set of exactly
realised small class sizes, and a per-variable class-size assignment.
Every quantifier-free formula is a disjunction of configuration formulas,
quantifiers are eliminated by projecting configurations, and closed
formulas land in the free Boolean algebra on the generator sentences
``A[n]`` ("there is a class of size exactly n+1").

A finite equivalence structure with a prescribed small-size spectrum
serves as a semantic oracle for cross-validation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .boolcomb import BOTTOM, TOP, GeneratorCombination
from .syntax import (
    And, Atom, Bot, Eq, Exists, Forall, FormulaError, Formula, Iff, Implies,
    Not, Or, Sugar, Top, Var, conj, contains_sugar, expand_sugar,
    free_variables, prenex,
)


# ---------------------------------------------------------------------------
# Configurations


@dataclass(frozen=True)
class Configuration:
    """Complete base-n description of a variable tuple.

    ``eq_blocks`` is the identity partition, ``e_blocks`` the coarser
    E-partition (tuples of variable-index tuples, canonically ordered by
    first occurrence).  ``sizes`` is the set of exactly realised class
    sizes in {1,..,n-1}; ``size_of`` assigns each variable its class size
    from ``sizes`` united with {n}, where n stands for "at least n".
    """

    n: int
    vars: tuple[str, ...]
    eq_blocks: tuple[tuple[int, ...], ...]
    e_blocks: tuple[tuple[int, ...], ...]
    sizes: frozenset[int]
    size_of: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("configuration base must be >= 1")
        if any(i < 1 or i >= self.n for i in self.sizes):
            raise ValueError("realised sizes must lie in {1,..,n-1}")
        for e_block in self.e_blocks:
            vals = {self.size_of[i] for i in e_block}
            if len(vals) > 1:
                raise ValueError("E-equivalent variables must share a size")
            val = vals.pop()
            if val not in self.sizes and val != self.n:
                raise ValueError("size value outside realised sizes and n")
            splits = sum(1 for b in self.eq_blocks if set(b) <= set(e_block))
            if splits > val:
                raise ValueError("E-class split into more identity classes than its size")
        for i in self.sizes:
            carriers = {tuple(b) for b in self.e_blocks
                        if self.size_of[b[0]] == i}
            if len(carriers) > 1:
                raise ValueError(f"size {i} carried by more than one E-class")

    def sort_key(self):
        return (_rgs(self.eq_blocks, len(self.vars)), _rgs(self.e_blocks, len(self.vars)),
                sum(1 << (i - 1) for i in self.sizes), self.size_of)

    def var_size(self, name: str) -> int:
        return self.size_of[self.vars.index(name)]

    def same_eq(self, a: str, b: str) -> bool:
        return _same_block(self.eq_blocks, self.vars.index(a), self.vars.index(b))

    def same_e(self, a: str, b: str) -> bool:
        return _same_block(self.e_blocks, self.vars.index(a), self.vars.index(b))


def _same_block(blocks, i, j) -> bool:
    return any(i in b and j in b for b in blocks)


def _rgs(blocks, nvars) -> tuple[int, ...]:
    label = {}
    for k, block in enumerate(blocks):
        for i in block:
            label[i] = k
    # relabel in order of first occurrence so the string is canonical
    seen: dict[int, int] = {}
    out = []
    for i in range(nvars):
        b = label[i]
        if b not in seen:
            seen[b] = len(seen)
        out.append(seen[b])
    return tuple(out)


def _partitions(items: tuple[int, ...]):
    """All set partitions, blocks ordered by first occurrence."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in _partitions(rest):
        yield ((first,),) + sub
        for k in range(len(sub)):
            yield sub[:k] + ((first,) + sub[k],) + sub[k + 1:]


def _coarsenings(partition):
    """All partitions coarser than ``partition`` (merging whole blocks)."""
    idx = tuple(range(len(partition)))
    for grouping in _partitions(idx):
        blocks = []
        for group in grouping:
            merged = tuple(sorted(itertools.chain.from_iterable(partition[g] for g in group)))
            blocks.append(merged)
        # canonical order: by smallest member
        yield tuple(sorted(blocks, key=lambda b: b[0]))


@lru_cache(maxsize=None)
def enumerate_configs(n: int, vars: tuple[str, ...]) -> tuple[Configuration, ...]:
    """All base-n configurations of ``vars``, deterministically ordered."""
    if n < 1:
        raise ValueError("configuration base must be >= 1")
    if len(set(vars)) != len(vars):
        raise ValueError("variables must be pairwise distinct")
    idx = tuple(range(len(vars)))
    out = []
    for eq_blocks in _partitions(idx):
        eq_blocks = tuple(sorted((tuple(sorted(b)) for b in eq_blocks), key=lambda b: b[0]))
        for e_blocks in _coarsenings(eq_blocks):
            splits = [sum(1 for b in eq_blocks if set(b) <= set(eb)) for eb in e_blocks]
            for size_mask in range(1 << (n - 1)):
                sizes = frozenset(i + 1 for i in range(n - 1) if size_mask >> i & 1)
                choices = sorted(sizes) + [n]
                for assignment in itertools.product(choices, repeat=len(e_blocks)):
                    if any(assignment[k] < splits[k] for k in range(len(e_blocks))):
                        continue
                    small = [v for v in assignment if v < n]
                    if len(small) != len(set(small)):
                        continue  # one exact size carried by two E-classes
                    size_of = [0] * len(vars)
                    for k, eb in enumerate(e_blocks):
                        for i in eb:
                            size_of[i] = assignment[k]
                    out.append(Configuration(n, vars, eq_blocks, e_blocks,
                                             sizes, tuple(size_of)))
    out.sort(key=Configuration.sort_key)
    return tuple(out)


# ---------------------------------------------------------------------------
# Configuration formulas and atom evaluation


def config_to_formula(c: Configuration) -> Formula:
    """The defining formula of a configuration, with sugar atoms for the
    exact-size and size-bound conditions."""
    parts: list[Formula] = []
    for i in range(len(c.vars)):
        for j in range(i + 1, len(c.vars)):
            eq = Eq(Var(c.vars[i]), Var(c.vars[j]))
            parts.append(eq if _same_block(c.eq_blocks, i, j) else Not(eq))
            e = Atom("E", (Var(c.vars[i]), Var(c.vars[j])))
            parts.append(e if _same_block(c.e_blocks, i, j) else Not(e))
    for i in range(1, c.n):
        a = Sugar("A", i - 1)
        parts.append(a if i in c.sizes else Not(a))
    for k, name in enumerate(c.vars):
        s = c.size_of[k]
        x = Var(name)
        if s < c.n:
            exact = And(Sugar("B", s - 1, (x,)), Not(Sugar("B", s, (x,)))) if s > 1 \
                else Not(Sugar("B", 1, (x,)))
            parts.append(exact)
        else:
            if c.n > 1:
                parts.append(Sugar("B", c.n - 1, (x,)))
    return conj(parts)


def _atom_value(c: Configuration, f: Formula) -> bool:
    match f:
        case Top():
            return True
        case Bot():
            return False
        case Eq(Var(a), Var(b)):
            return a == b or c.same_eq(a, b)
        case Atom("E", (Var(a), Var(b))):
            return a == b or c.same_e(a, b)
    raise FormulaError(f"cannot evaluate atom under a configuration: {f!r}")


def _eval_qf(c: Configuration, f: Formula) -> bool:
    match f:
        case Not(body):
            return not _eval_qf(c, body)
        case And(a, b):
            return _eval_qf(c, a) and _eval_qf(c, b)
        case Or(a, b):
            return _eval_qf(c, a) or _eval_qf(c, b)
        case Implies(a, b):
            return not _eval_qf(c, a) or _eval_qf(c, b)
        case Iff(a, b):
            return _eval_qf(c, a) == _eval_qf(c, b)
        case _:
            return _atom_value(c, f)


def qf_to_configs(matrix: Formula, n: int, vars: tuple[str, ...]) -> frozenset[Configuration]:
    """The unique configuration set whose disjunction is equivalent to the
    quantifier-free ``matrix``: each configuration decides every atom, so a
    configuration is kept iff the matrix holds under its atom valuation."""
    from .syntax import _has_quantifier
    if _has_quantifier(matrix):
        raise FormulaError("matrix must be quantifier-free")
    if not free_variables(matrix) <= set(vars):
        raise FormulaError("matrix has free variables outside the given tuple")
    return frozenset(c for c in enumerate_configs(n, vars) if _eval_qf(c, matrix))


def project_config(c: Configuration, keep: tuple[str, ...]) -> Configuration:
    """Existential projection: restrict both partitions and the size map to
    ``keep``; realised sizes are unchanged.  Requires ``len(keep) <= n-1``."""
    if len(keep) > c.n - 1:
        raise ValueError("projection target exceeds the n-1 variable bound")
    if not set(keep) <= set(c.vars):
        raise ValueError("projection target must be a subset of the variables")
    keep_idx = [c.vars.index(v) for v in keep]
    remap = {old: new for new, old in enumerate(keep_idx)}

    def restrict(blocks):
        out = []
        for b in blocks:
            nb = tuple(sorted(remap[i] for i in b if i in remap))
            if nb:
                out.append(nb)
        return tuple(sorted(out, key=lambda b: b[0]))

    return Configuration(c.n, tuple(keep), restrict(c.eq_blocks), restrict(c.e_blocks),
                         c.sizes, tuple(c.size_of[i] for i in keep_idx))


# ---------------------------------------------------------------------------
# Quantifier elimination


def _eliminate_prefix(configs: frozenset[Configuration], prefix, n: int,
                      outer_vars: tuple[str, ...]) -> frozenset[Configuration]:
    """Fold the quantifier prefix from the inside out over a configuration
    set; universals go through double complementation."""
    var_order = list(outer_vars) + [v for _, v in prefix]
    for depth in range(len(prefix), 0, -1):
        kind, _ = prefix[depth - 1]
        current = tuple(var_order[:len(outer_vars) + depth])
        target = tuple(var_order[:len(outer_vars) + depth - 1])
        if kind == "exists":
            configs = frozenset(project_config(c, target) for c in configs)
        else:
            universe = set(enumerate_configs(n, current))
            complement = frozenset(universe - configs)
            projected = frozenset(project_config(c, target) for c in complement)
            configs = frozenset(set(enumerate_configs(n, target)) - projected)
    return configs


def _empty_config_to_minterm(c: Configuration) -> GeneratorCombination:
    signs = {i - 1: (i in c.sizes) for i in range(1, c.n)}
    if not signs:
        return TOP
    return GeneratorCombination.minterm(signs)


def _qe_closed_pipeline(f: Formula) -> GeneratorCombination:
    """Configuration pipeline for a closed formula without sugar atoms at
    the top level (inner sugar is expanded first)."""
    f = expand_sugar(f)
    pf = prenex(f)
    m = len(pf.prefix)
    n = max(1, m)
    vars_all = tuple(v for _, v in pf.prefix)
    configs = qf_to_configs(pf.matrix, n, vars_all)
    configs = _eliminate_prefix(configs, pf.prefix, n, ())
    result = BOTTOM
    for c in configs:
        result = result | _empty_config_to_minterm(c)
    return result


def qe_sentence(f: Formula) -> GeneratorCombination:
    """Canonical boolean combination of the generators equivalent to the
    closed formula ``f``.

    Boolean structure is eliminated homomorphically (quantifier elimination
    is a Boolean-algebra isomorphism on sentences), generator sugar atoms
    map straight to generators, and genuinely quantified closed leaves run
    through the configuration pipeline.  This keeps sign patterns over many
    generators tractable: the pipeline cost depends only on each leaf's own
    quantifier count.
    """
    if free_variables(f):
        raise FormulaError("qe_sentence requires a sentence (no free variables)")
    match f:
        case Top():
            return TOP
        case Bot():
            return BOTTOM
        case Sugar("A", n, ()):
            return GeneratorCombination.generator(n)
        case Not(body):
            return ~qe_sentence(body)
        case And(a, b):
            return qe_sentence(a) & qe_sentence(b)
        case Or(a, b):
            return qe_sentence(a) | qe_sentence(b)
        case Implies(a, b):
            return qe_sentence(a).implies(qe_sentence(b))
        case Iff(a, b):
            return qe_sentence(a).iff(qe_sentence(b))
        case _:
            return _qe_closed_pipeline(f)


def decide_J(f: Formula) -> bool:
    """Provability over the base theory: a sentence is a theorem iff its
    canonical combination is top (the generators are mutually independent)."""
    return qe_sentence(f).is_top


def consistent_with_J(g: GeneratorCombination) -> bool:
    """Free-algebra satisfiability: anything but bottom is consistent."""
    return not g.is_bottom


def qe_open(f: Formula) -> tuple[int, frozenset[Configuration]]:
    """Quantifier elimination for a formula with free variables: returns
    ``(n, configs)`` with the formula equivalent to the disjunction of the
    configurations over its free variables."""
    f = expand_sugar(f)
    fv_order = _first_occurrence_order(f)
    pf = prenex(f)
    m = len(pf.prefix)
    n = max(1, m + len(fv_order))
    vars_all = tuple(fv_order) + tuple(v for _, v in pf.prefix)
    configs = qf_to_configs(pf.matrix, n, vars_all)
    configs = _eliminate_prefix(configs, pf.prefix, n, tuple(fv_order))
    return n, configs


def _first_occurrence_order(f: Formula) -> list[str]:
    fv = free_variables(f)
    order: list[str] = []

    def walk(g: Formula):
        match g:
            case Atom(_, args) | Sugar(_, _, args):
                for t in args:
                    _walk_term(t)
            case Eq(a, b):
                _walk_term(a)
                _walk_term(b)
            case Not(body) | Exists(_, body) | Forall(_, body):
                walk(body)
            case And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b):
                walk(a)
                walk(b)
            case _:
                pass

    def _walk_term(t):
        match t:
            case Var(name):
                if name in fv and name not in order:
                    order.append(name)
            case _:
                for sub in getattr(t, "args", ()):
                    _walk_term(sub)

    walk(f)
    return order


def configs_to_extended_formula(configs, n: int, vars: tuple[str, ...]) -> Formula:
    """Quantifier-free form in the signature extended by the generator and
    size-bound sugar atoms, as a disjunction of configuration formulas."""
    ordered = sorted(configs, key=Configuration.sort_key)
    from .syntax import disj
    return disj([config_to_formula(c) for c in ordered])


# ---------------------------------------------------------------------------
# Finite-structure semantic oracle


@dataclass(frozen=True)
class SpectrumStructure:
    """Finite equivalence structure whose exact class-size spectrum below the
    probe rank is prescribed; elements are (class index, member index)."""

    class_sizes: tuple[int, ...]

    @property
    def domain(self) -> tuple[tuple[int, int], ...]:
        return tuple((c, i) for c, size in enumerate(self.class_sizes) for i in range(size))

    def related(self, a: tuple[int, int], b: tuple[int, int]) -> bool:
        return a[0] == b[0]

    def class_size(self, a: tuple[int, int]) -> int:
        return self.class_sizes[a[0]]

    def has_size(self, size: int) -> bool:
        return size in self.class_sizes


def build_spectrum_structure(sizes, n: int) -> SpectrumStructure:
    """One class of each size in ``sizes`` (all < n), plus n large classes of
    pairwise distinct sizes n+1..2n, so at-most-one-class-per-size holds
    exactly and the large-class axiom holds up to level n."""
    sizes = sorted(set(sizes))
    if any(s < 1 or s >= n for s in sizes):
        raise ValueError("spectrum sizes must lie in {1,..,n-1}")
    return SpectrumStructure(tuple(sizes) + tuple(range(n + 1, 2 * n + 1)))


def eval_in_structure(f: Formula, structure: SpectrumStructure,
                      assignment: dict[str, tuple[int, int]] | None = None) -> bool:
    """Tarskian satisfaction with exhaustive quantifier search; sugar atoms
    are evaluated by direct class-size counting, which keeps the oracle
    independent of the sugar expansion."""
    env = dict(assignment or {})

    def ev(g: Formula, env) -> bool:
        match g:
            case Top():
                return True
            case Bot():
                return False
            case Atom("E", (Var(a), Var(b))):
                return structure.related(_lookup(env, a), _lookup(env, b))
            case Eq(Var(a), Var(b)):
                return _lookup(env, a) == _lookup(env, b)
            case Sugar("A", n, ()):
                return structure.has_size(n + 1)
            case Sugar("B", n, (Var(a),)):
                return structure.class_size(_lookup(env, a)) > n
            case Not(body):
                return not ev(body, env)
            case And(a, b):
                return ev(a, env) and ev(b, env)
            case Or(a, b):
                return ev(a, env) or ev(b, env)
            case Implies(a, b):
                return not ev(a, env) or ev(b, env)
            case Iff(a, b):
                return ev(a, env) == ev(b, env)
            case Exists(var, body):
                return any(ev(body, {**env, var: d}) for d in structure.domain)
            case Forall(var, body):
                return all(ev(body, {**env, var: d}) for d in structure.domain)
        raise FormulaError(f"cannot evaluate in structure: {g!r}")

    return ev(f, env)


def _lookup(env, name):
    try:
        return env[name]
    except KeyError:
        raise FormulaError(f"variable {name!r} not covered by the assignment") from None
