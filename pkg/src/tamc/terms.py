"""Term representations for the three calculi and their static measures.

Three term languages share the application, projection, and tuple
constructors:

* source terms add multi-parameter abstractions,
* intermediate terms replace abstractions with closures carrying an
  explicit bag (either the list of wrapped variables or a tuple of
  values),
* target terms are nameless: variables become indexed projections out
  of one of two implicit tuples ("l" for the wrapped values, "s" for
  the parameters), and closures carry the expected arities of both.

All nodes are immutable. Sequences are stored as tuples so terms hash
and compare structurally. Projection indices are 1-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Var:
    """A variable, used both as a term and as a binder list entry."""

    name: str


@dataclass(frozen=True, slots=True)
class Abs:
    """Multi-parameter abstraction. Parameters are pairwise distinct."""

    params: tuple[Var, ...]
    body: "SourceTerm"

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameters: {names}")


@dataclass(frozen=True, slots=True)
class App:
    fn: "AnyTerm"
    arg: "AnyTerm"


@dataclass(frozen=True, slots=True)
class Proj:
    index: int
    arg: "AnyTerm"


@dataclass(frozen=True, slots=True)
class Tuple:
    items: tuple["AnyTerm", ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True, slots=True)
class VarBag:
    """Bag holding the wrapped variables themselves (unevaluated)."""

    vars: tuple[Var, ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))


@dataclass(frozen=True, slots=True)
class ValBag:
    """Bag holding already evaluated values."""

    vals: tuple["AnyTerm", ...]

    def __post_init__(self):
        object.__setattr__(self, "vals", tuple(self.vals))


def _canonical_bag(bag):
    # The empty bag is both a variable bag and a value bag; a single
    # representation keeps equality and primality structural.
    if isinstance(bag, (VarBag, PVarBag)) and not (bag.vars if isinstance(bag, VarBag) else bag.pvars):
        return ValBag(())
    return bag


@dataclass(frozen=True, slots=True)
class Closure:
    """Intermediate closure [wrapped; params. body] with its bag.

    The wrapped and param variables scope over the body only, never
    over the bag.
    """

    wrapped: tuple[Var, ...]
    params: tuple[Var, ...]
    body: "IntTerm"
    bag: "VarBag | ValBag"

    def __post_init__(self):
        object.__setattr__(self, "wrapped", tuple(self.wrapped))
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "bag", _canonical_bag(self.bag))


@dataclass(frozen=True, slots=True)
class PVar:
    """Indexed projection out of an implicit tuple: base 'l' or 's'."""

    base: str
    index: int

    def __post_init__(self):
        if self.base not in ("l", "s"):
            raise ValueError(f"projection variable base must be 'l' or 's', got {self.base!r}")


@dataclass(frozen=True, slots=True)
class PVarBag:
    pvars: tuple[PVar, ...]

    def __post_init__(self):
        object.__setattr__(self, "pvars", tuple(self.pvars))


@dataclass(frozen=True, slots=True)
class TClosure:
    """Nameless closure with arity annotations.

    n_wrapped is the promised length of the wrapped-value tuple, and
    n_params the expected length of the argument tuple.
    """

    n_wrapped: int
    n_params: int
    body: "TargetTerm"
    bag: "PVarBag | ValBag"

    def __post_init__(self):
        object.__setattr__(self, "bag", _canonical_bag(self.bag))


SourceTerm = Var | Abs | App | Proj | Tuple
IntTerm = Var | Closure | App | Proj | Tuple
TargetTerm = PVar | TClosure | App | Proj | Tuple
AnyTerm = SourceTerm | IntTerm | TargetTerm


@dataclass(frozen=True, slots=True)
class TermMetrics:
    size: int
    width: int
    height: int


def metrics(t: SourceTerm) -> TermMetrics:
    """Size, width, and height of a source term.

    Size clauses: |x| = 1, |fun(xs) -> t| = |t| + len(xs) + 1,
    |t u| = |t| + |u| + 1, |pi i t| = |t| + 1, |<t1..tn>| = n + sum.
    Width is the longest tuple or parameter list anywhere in the term.
    Height is the largest number of bound variables in whose scope a
    subterm sits, so a zero-parameter abstraction adds nothing.
    """

    def go(t) -> tuple[int, int, int]:
        match t:
            case Var(_):
                return 1, 0, 0
            case Abs(params, body):
                s, w, h = go(body)
                k = len(params)
                return s + k + 1, max(w, k), h + k
            case App(fn, arg):
                s1, w1, h1 = go(fn)
                s2, w2, h2 = go(arg)
                return s1 + s2 + 1, max(w1, w2), max(h1, h2)
            case Proj(_, arg):
                s, w, h = go(arg)
                return s + 1, w, h
            case Tuple(items):
                parts = [go(it) for it in items]
                return (
                    len(items) + sum(p[0] for p in parts),
                    max([len(items)] + [p[1] for p in parts], default=0),
                    max([p[2] for p in parts], default=0),
                )
        raise TypeError(f"not a source term: {t!r}")

    size, width, height = go(t)
    return TermMetrics(size, width, height)


def size_int(t: IntTerm) -> int:
    """Size of an intermediate term.

    A closure counts its body plus both binder list lengths; a
    variable bag adds nothing on top of that (its length equals the
    wrapped count), while value bags add their values' sizes.
    """
    match t:
        case Var(_):
            return 1
        case Closure(wrapped, params, body, bag):
            extra = sum(size_int(v) for v in bag.vals) if isinstance(bag, ValBag) else 0
            return size_int(body) + len(wrapped) + len(params) + extra
        case App(fn, arg):
            return size_int(fn) + size_int(arg) + 1
        case Proj(_, arg):
            return size_int(arg) + 1
        case Tuple(items):
            return len(items) + sum(size_int(it) for it in items)
    raise TypeError(f"not an intermediate term: {t!r}")


def size_target(t: TargetTerm) -> int:
    """Size of a target term; mirrors size_int with |closure| = |body| + n + m."""
    match t:
        case PVar(_, _):
            return 1
        case TClosure(n, m, body, bag):
            extra = sum(size_target(v) for v in bag.vals) if isinstance(bag, ValBag) else 0
            return size_target(body) + n + m + extra
        case App(fn, arg):
            return size_target(fn) + size_target(arg) + 1
        case Proj(_, arg):
            return size_target(arg) + 1
        case Tuple(items):
            return len(items) + sum(size_target(it) for it in items)
    raise TypeError(f"not a target term: {t!r}")


def shared_size_source(t: SourceTerm) -> int:
    """Source size over a term DAG, visiting each shared node once.

    Substitution and read-back share value nodes instead of copying
    them, so normal forms of exploding families are small DAGs whose
    unfolded size this computes without materializing the tree.
    """
    memo: dict[int, int] = {}

    def go(t) -> int:
        cached = memo.get(id(t))
        if cached is not None:
            return cached
        match t:
            case Var(_):
                s = 1
            case Abs(params, body):
                s = go(body) + len(params) + 1
            case App(fn, arg):
                s = go(fn) + go(arg) + 1
            case Proj(_, arg):
                s = go(arg) + 1
            case Tuple(items):
                s = len(items) + sum(go(it) for it in items)
            case _:
                raise TypeError(f"not a source term: {t!r}")
        memo[id(t)] = s
        return s

    return go(t)


def free_var_names(t: SourceTerm, memo: dict | None = None) -> frozenset:
    """Free variable names of a source term as a set.

    Memoized by node identity: substitution and read-back share value
    nodes, so terms are DAGs and the naive walk would revisit shared
    subtrees exponentially often.
    """
    if memo is None:
        memo = {}

    def go(t) -> frozenset:
        cached = memo.get(id(t))
        if cached is not None:
            return cached
        match t:
            case Var(name):
                s = frozenset((name,))
            case Abs(params, body):
                s = go(body) - {p.name for p in params}
            case App(fn, arg):
                s = go(fn) | go(arg)
            case Proj(_, arg):
                s = go(arg)
            case Tuple(items):
                s = frozenset().union(*(go(it) for it in items)) if items else frozenset()
            case _:
                raise TypeError(f"not a source term: {t!r}")
        memo[id(t)] = s
        return s

    return go(t)


def free_vars(t: SourceTerm | IntTerm) -> tuple[Var, ...]:
    """Free variables in order of first occurrence, left to right.

    Works on source and intermediate terms. Closure binders scope over
    the body only; bag occurrences are free.
    """
    seen: dict[Var, None] = {}

    def note(v: Var, bound: frozenset):
        if v not in bound and v not in seen:
            seen[v] = None

    def walk(t, bound: frozenset):
        match t:
            case Var(_):
                note(t, bound)
            case Abs(params, body):
                walk(body, bound | set(params))
            case App(fn, arg):
                walk(fn, bound)
                walk(arg, bound)
            case Proj(_, arg):
                walk(arg, bound)
            case Tuple(items):
                for it in items:
                    walk(it, bound)
            case Closure(wrapped, params, body, bag):
                walk(body, bound | set(wrapped) | set(params))
                match bag:
                    case VarBag(vs):
                        for v in vs:
                            note(v, bound)
                    case ValBag(vals):
                        for v in vals:
                            walk(v, bound)
            case _:
                raise TypeError(f"term has no named variables: {t!r}")

    walk(t, frozenset())
    return tuple(seen)


def is_closed_source(t: SourceTerm) -> bool:
    return not free_vars(t)


def closed_int(t: IntTerm) -> bool:
    return not free_vars(t)


def is_value_source(t: SourceTerm) -> bool:
    match t:
        case Abs(_, _):
            return True
        case Tuple(items):
            return all(is_value_source(it) for it in items)
    return False


def is_value_int(t: IntTerm) -> bool:
    # every closure is a value, whichever bag it carries
    match t:
        case Closure(_, _, _, _):
            return True
        case Tuple(items):
            return all(is_value_int(it) for it in items)
    return False


def is_value_target(t: TargetTerm) -> bool:
    match t:
        case TClosure(_, _, _, _):
            return True
        case Tuple(items):
            return all(is_value_target(it) for it in items)
    return False


def well_formed_int(t: IntTerm) -> bool:
    """Check the closure discipline everywhere in the term.

    For each closure: binders are pairwise distinct and disjoint, the
    body mentions only binder variables, a variable bag repeats the
    wrapped list exactly, and a value bag supplies one value per
    wrapped variable.
    """
    match t:
        case Var(_):
            return True
        case Closure(wrapped, params, body, bag):
            names = [v.name for v in wrapped + params]
            if len(set(names)) != len(names):
                return False
            if not set(free_vars(body)) <= set(wrapped) | set(params):
                return False
            if not well_formed_int(body):
                return False
            match bag:
                case VarBag(vs):
                    return vs == wrapped
                case ValBag(vals):
                    return len(vals) == len(wrapped) and all(
                        is_value_int(v) and well_formed_int(v) for v in vals
                    )
        case App(fn, arg):
            return well_formed_int(fn) and well_formed_int(arg)
        case Proj(_, arg):
            return well_formed_int(arg)
        case Tuple(items):
            return all(well_formed_int(it) for it in items)
    raise TypeError(f"not an intermediate term: {t!r}")


def prime_int(t: IntTerm) -> bool:
    """True when every bag in the term is a variable bag (empty counts)."""
    match t:
        case Var(_):
            return True
        case Closure(_, _, body, bag):
            match bag:
                case VarBag(_):
                    return prime_int(body)
                case ValBag(vals):
                    return not vals and prime_int(body)
        case App(fn, arg):
            return prime_int(fn) and prime_int(arg)
        case Proj(_, arg):
            return prime_int(arg)
        case Tuple(items):
            return all(prime_int(it) for it in items)
    raise TypeError(f"not an intermediate term: {t!r}")


def norms_target(t: TargetTerm) -> tuple[int, int]:
    """Largest l- and s-projection indices outside closure bodies.

    Closure bags count as outside; closure bodies do not.
    """
    match t:
        case PVar(base, i):
            return (i, 0) if base == "l" else (0, i)
        case TClosure(_, _, _, bag):
            match bag:
                case PVarBag(ps):
                    pairs = [norms_target(p) for p in ps]
                case ValBag(vals):
                    pairs = [norms_target(v) for v in vals]
            return (
                max((p[0] for p in pairs), default=0),
                max((p[1] for p in pairs), default=0),
            )
        case App(fn, arg):
            l1, s1 = norms_target(fn)
            l2, s2 = norms_target(arg)
            return max(l1, l2), max(s1, s2)
        case Proj(_, arg):
            return norms_target(arg)
        case Tuple(items):
            pairs = [norms_target(it) for it in items]
            return (
                max((p[0] for p in pairs), default=0),
                max((p[1] for p in pairs), default=0),
            )
    raise TypeError(f"not a target term: {t!r}")


def closed_target(t: TargetTerm) -> bool:
    """Closed means no projection variable occurs outside a closure body."""
    return norms_target(t) == (0, 0)


def well_formed_target(t: TargetTerm) -> bool:
    """Check arity promises: body norms within (n, m), bag length n."""
    match t:
        case PVar(_, _):
            return True
        case TClosure(n, m, body, bag):
            if n < 0 or m < 0:
                return False
            l, s = norms_target(body)
            if l > n or s > m:
                return False
            if not well_formed_target(body):
                return False
            match bag:
                case PVarBag(ps):
                    return len(ps) == n
                case ValBag(vals):
                    return len(vals) == n and all(
                        is_value_target(v) and well_formed_target(v) for v in vals
                    )
        case App(fn, arg):
            return well_formed_target(fn) and well_formed_target(arg)
        case Proj(_, arg):
            return well_formed_target(arg)
        case Tuple(items):
            return all(well_formed_target(it) for it in items)
    raise TypeError(f"not a target term: {t!r}")


def prime_target(t: TargetTerm) -> bool:
    match t:
        case PVar(_, _):
            return True
        case TClosure(_, _, body, bag):
            match bag:
                case PVarBag(_):
                    return prime_target(body)
                case ValBag(vals):
                    return not vals and prime_target(body)
        case App(fn, arg):
            return prime_target(fn) and prime_target(arg)
        case Proj(_, arg):
            return prime_target(arg)
        case Tuple(items):
            return all(prime_target(it) for it in items)
    raise TypeError(f"not a target term: {t!r}")


class _Binds:
    """On-the-fly de Bruijn levels for alpha comparison."""

    __slots__ = ("map", "next")

    def __init__(self):
        self.map: dict[str, int] = {}
        self.next = 0

    def child(self, names):
        c = _Binds.__new__(_Binds)
        c.map = dict(self.map)
        c.next = self.next
        for n in names:
            c.map[n.name] = c.next
            c.next += 1
        return c


def _alpha_var(a: Var, b: Var, ma: _Binds, mb: _Binds) -> bool:
    ia = ma.map.get(a.name)
    ib = mb.map.get(b.name)
    if ia is None and ib is None:
        return a.name == b.name
    return ia is not None and ia == ib


def alpha_eq_source(a: SourceTerm, b: SourceTerm) -> bool:
    """Alpha equivalence of source terms; free variables compare by name."""

    def go(a, b, ma, mb):
        match a, b:
            case Var(_), Var(_):
                return _alpha_var(a, b, ma, mb)
            case Abs(pa, ba), Abs(pb, bb):
                if len(pa) != len(pb):
                    return False
                return go(ba, bb, ma.child(pa), mb.child(pb))
            case App(f1, a1), App(f2, a2):
                return go(f1, f2, ma, mb) and go(a1, a2, ma, mb)
            case Proj(i, t1), Proj(j, t2):
                return i == j and go(t1, t2, ma, mb)
            case Tuple(xs), Tuple(ys):
                return len(xs) == len(ys) and all(
                    go(p, q, ma, mb) for p, q in zip(xs, ys)
                )
        return False

    return go(a, b, _Binds(), _Binds())


def alpha_eq_int(a: IntTerm, b: IntTerm) -> bool:
    """Alpha equivalence of intermediate terms.

    A closure's wrapped and param lists both bind in the body; the bag
    lives in the enclosing scope.
    """

    def go(a, b, ma, mb):
        match a, b:
            case Var(_), Var(_):
                return _alpha_var(a, b, ma, mb)
            case Closure(w1, p1, b1, g1), Closure(w2, p2, b2, g2):
                if len(w1) != len(w2) or len(p1) != len(p2):
                    return False
                if not go(b1, b2, ma.child(w1 + p1), mb.child(w2 + p2)):
                    return False
                match g1, g2:
                    case VarBag(v1), VarBag(v2):
                        return len(v1) == len(v2) and all(
                            _alpha_var(p, q, ma, mb) for p, q in zip(v1, v2)
                        )
                    case ValBag(v1), ValBag(v2):
                        return len(v1) == len(v2) and all(
                            go(p, q, ma, mb) for p, q in zip(v1, v2)
                        )
                return False
            case App(f1, a1), App(f2, a2):
                return go(f1, f2, ma, mb) and go(a1, a2, ma, mb)
            case Proj(i, t1), Proj(j, t2):
                return i == j and go(t1, t2, ma, mb)
            case Tuple(xs), Tuple(ys):
                return len(xs) == len(ys) and all(
                    go(p, q, ma, mb) for p, q in zip(xs, ys)
                )
        return False

    return go(a, b, _Binds(), _Binds())


alpha_eq = alpha_eq_int
