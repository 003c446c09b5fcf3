"""String-cover weight functions and critical-exponent pressures.

The cover of reference is always the partition of a shift space into the
cylinders of a fixed depth t.  A string of N cover elements has nonempty
domain exactly when the overlapping windows assemble into one admissible
word of length N + t - 1, so string combinatorics reduce to word
combinatorics and the two covering sums of interest become exact:

* the fixed-length sum ("capacity" side) is the sum, over admissible
  words of length N + t - 1 whose cylinder meets the target subset, of
  exp(sup of the N-term Birkhoff sum over the cylinder);

* the variable-length sum ("critical exponent" side) is the infimum over
  prefix-free families of words of length >= N + t - 1 covering the
  subset of exp(-alpha * string length + Birkhoff sup).  Any covering
  family dominates such an antichain of no greater weight, so the
  infimum is a minimum over antichains and is computed by dynamic
  programming on the cylinder tree, truncated at a reported depth cap.

Both computations run on a small state space (the trailing symbols a
word needs to extend: max(t, potential depth) - 1 of them, at least 1),
so costs are linear in the word length instead of exponential.

The topological pressure of a subset is the critical alpha at which the
variable-length sum switches from growing to vanishing with N; it is
located by bisection, classifying each alpha by the least-squares slope
of log(sum) against N over the top half of the N-window.  Lower/upper
capacity pressures come from the successive differences of log(sum)
against N (which converge to the same limit as (1/N) log(sum), but
geometrically fast on these systems, instead of at rate 1/N).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .shifts import (
    CylinderSet,
    Potential,
    ShiftSystem,
    SubsetSpec,
    Word,
    admissible_words,
    birkhoff_sup,
    iter_admissible_tuples,
)


class InconclusiveError(RuntimeError):
    """Growth classification failed within the computational budget."""


class Cover:
    """Partition of the shift space into all cylinders of one depth.

    Depth-t cylinders are clopen balls of diameter 2**(-t), so these
    covers realize arbitrarily small diameters as t grows.
    """

    def __init__(self, system: ShiftSystem, depth: int):
        if depth < 1:
            raise ValueError("cover depth must be >= 1")
        self.system = system
        self.depth = int(depth)

    def diameter(self) -> float:
        return 2.0 ** (-self.depth)

    def elements(self) -> list[CylinderSet]:
        return [CylinderSet(w) for w in admissible_words(self.system, self.depth)]

    def oscillation(self, potential: Potential) -> float:
        """Largest variation of the potential inside one cover element."""
        return potential.oscillation(self.depth)


class CoverString:
    """A string of cover elements with its domain and weights.

    The domain is the set of points whose first m iterates visit the
    chosen elements in order; on a cylinder partition it is itself a
    cylinder (of depth m + t - 1) or empty.  The three weights of the
    underlying dimension structure are exp of the Birkhoff supremum over
    the domain (zero for an empty domain), exp(-m), and 1/m; the last is
    carried for completeness but no computed quantity consumes it.

    Bulk computations never materialize these objects (there are
    exponentially many); the class exists for inspection and testing.
    """

    def __init__(self, cover: Cover, element_indices, potential: Potential):
        self.cover = cover
        self.potential = potential
        self.indices = tuple(int(i) for i in element_indices)
        if not self.indices:
            raise ValueError("strings must have positive length")
        words = admissible_words(cover.system, cover.depth)
        pieces = [words[i].symbols for i in self.indices]
        assembled = list(pieces[0])
        for prev, cur in zip(pieces, pieces[1:]):
            if prev[1:] != cur[:-1]:
                assembled = None
                break
            assembled.append(cur[-1])
        if assembled is not None and cover.system.is_admissible(assembled):
            self.domain = CylinderSet(Word(tuple(assembled), cover.system))
        else:
            self.domain = None

    @property
    def length(self) -> int:
        return len(self.indices)

    @property
    def xi(self) -> float:
        if self.domain is None:
            return 0.0
        return math.exp(birkhoff_sup(self.potential, self.domain.base_word,
                                     self.length))

    @property
    def eta(self) -> float:
        return math.exp(-self.length)

    @property
    def psi(self) -> float:
        return 1.0 / self.length

    def weight(self, alpha: float) -> float:
        """xi * eta**alpha, the summand of the covering weight."""
        return self.xi * self.eta ** alpha


@dataclass
class PressureEstimate:
    """A pressure value with the diagnostics of how it was obtained."""

    value: float
    cover_depth: int
    n_range: tuple
    bracket: tuple
    mode: str  # "P" | "CP_lower" | "CP_upper"
    diagnostics: dict = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        return bool(self.diagnostics.get("degenerate", False))


def _forward_live(B: np.ndarray) -> np.ndarray:
    """Symbols from which an infinite admissible path exists (greatest
    fixed point of 'has an allowed successor that is itself live')."""
    live = np.ones(B.shape[0], dtype=bool)
    while True:
        nxt = (B[:, live].sum(axis=1) > 0) if live.any() else live & False
        if (nxt == live).all():
            return live
        live = nxt


class _StringCalculus:
    """Shared state-space machinery for both covering sums."""

    def __init__(self, subset: SubsetSpec, potential: Potential, cover: Cover):
        system = cover.system
        if potential.system is not system and \
                not np.array_equal(potential.system.adjacency, system.adjacency):
            raise ValueError("potential does not match the cover's system")
        if subset.system is not system and \
                not np.array_equal(subset.system.adjacency, system.adjacency):
            raise ValueError("subset does not match the cover's system")
        r, t = potential.depth, cover.depth
        if t < r:
            raise ValueError("cover depth must be >= potential depth "
                             "(exactness regime)")
        self.system = system
        self.subset = subset
        self.potential = potential
        self.r, self.t = r, t
        self.sdepth = max(t - 1, 1)
        self.A = system.adjacency

        if subset.kind == SubsetSpec.SUB_SFT:
            B = subset.sub_adjacency
            self.graph = B
            self.live = _forward_live(B)
        else:
            self.graph = self.A
            self.live = np.ones(system.alphabet_size, dtype=bool)

        # states: admissible sdepth-words of the working graph whose
        # symbols can all continue indefinitely
        self.states = [s for s in iter_admissible_tuples(self.graph, self.sdepth)
                       if all(self.live[a] for a in s)]
        self.state_id = {s: i for i, s in enumerate(self.states)}
        # A-graph states for cylinder-union subtrees (the subset contains
        # the whole subtree below each listed word)
        if subset.kind == SubsetSpec.CYLINDERS:
            self.full_states = list(iter_admissible_tuples(self.A, self.sdepth))
            self.full_state_id = {s: i for i, s in enumerate(self.full_states)}
        else:
            self.full_states = self.states
            self.full_state_id = self.state_id
        self._entry_cache: dict = {}
        self._cfactor_cache: dict = {}

    # -- window bookkeeping -------------------------------------------------

    def _seed_log(self, word: tuple, n_target: int) -> float:
        """Sum of the complete Birkhoff windows of a seed word, clipped to
        window positions < n_target."""
        r = self.r
        top = min(len(word) - r, n_target - 1)
        return sum(self.potential.value(word[p:p + r]) for p in range(top + 1))

    def _append_factor(self, state: tuple, a: int, position: int,
                       n_target: int) -> float:
        """Birkhoff contribution of appending symbol ``a`` at word index
        ``position`` (0-based), while summing windows below n_target."""
        p = position - self.r + 1
        if 0 <= p <= n_target - 1:
            window = (state + (a,))[len(state) + 1 - self.r:]
            return self.potential.value(window)
        return 0.0

    def _transition_window(self, state: tuple, a: int) -> tuple:
        """Window completed by one string-length increment out of ``state``."""
        joint = state + (a,)
        start = self.sdepth + 1 - self.t
        return joint[start:start + self.r]

    # -- entry families at word length L0 = N + t - 1 -----------------------

    def _entry_logs(self, N: int) -> tuple[dict, list]:
        """Log-weights of the meeting words of length N + t - 1.

        Returns (per-state log-sums for words whose subtree continues
        homogeneously, list of (word, deeper listed words) for explicit
        trie roots coming from listed cylinders deeper than the entry
        level).  Cached per N: the sums do not depend on the exponent.
        """
        if N in self._entry_cache:
            return self._entry_cache[N]
        L0 = N + self.t - 1
        if self.subset.kind == SubsetSpec.CYLINDERS:
            result = self._entry_logs_cylinders(N, L0)
        else:
            logW = {}
            for s in self.states:
                logW[s] = self._seed_log(s, N)
            logW = self._advance(logW, self.sdepth, L0, N, self.graph,
                                 self.live)
            result = (logW, [])
        self._entry_cache[N] = result
        return result

    def _advance(self, logW: dict, start_len: int, end_len: int, N: int,
                 graph, live) -> dict:
        cur = dict(logW)
        for pos in range(start_len, end_len):
            nxt: dict = {}
            for s, lw in cur.items():
                for a in np.flatnonzero(graph[s[-1]]):
                    a = int(a)
                    if not live[a]:
                        continue
                    ns = (s + (a,))[-self.sdepth:]
                    val = lw + self._append_factor(s, a, pos, N)
                    nxt[ns] = np.logaddexp(nxt[ns], val) if ns in nxt else val
            cur = nxt
        return cur

    def _entry_logs_cylinders(self, N: int, L0: int) -> tuple[dict, list]:
        seeds_by_len: dict[int, dict] = {}
        trie_words = []
        for u in self.subset.words:
            if len(u) > L0:
                trie_words.append(u)
                continue
            if len(u) >= self.sdepth:
                starts = [u]
            else:
                starts = [u + ext[1:] for ext in
                          iter_admissible_tuples(self.A, self.sdepth - len(u) + 1)
                          if ext[0] == u[-1]]
            for w in starts:
                d = seeds_by_len.setdefault(len(w), {})
                key = w[-self.sdepth:]
                val = self._seed_log(w, N)
                d[key] = np.logaddexp(d[key], val) if key in d else val
        logW: dict = {}
        if seeds_by_len:
            cur: dict = {}
            all_live = np.ones(self.system.alphabet_size, bool)
            for pos in range(min(seeds_by_len), L0):
                for key, val in seeds_by_len.get(pos, {}).items():
                    cur[key] = np.logaddexp(cur[key], val) if key in cur else val
                cur = self._advance(cur, pos, pos + 1, N, self.A, all_live)
            for key, val in seeds_by_len.get(L0, {}).items():
                cur[key] = np.logaddexp(cur[key], val) if key in cur else val
            logW = cur
        roots = {}
        for u in trie_words:
            v = u[:L0]
            roots.setdefault(v, []).append(u)
        trie = [(v, us) for v, us in roots.items()]
        return logW, trie

    # -- fixed-length covering sum ------------------------------------------

    def log_lambda(self, N: int) -> float:
        if N < 1:
            raise ValueError("N must be >= 1")
        if self.subset.is_empty:
            return -math.inf
        logW, trie = self._entry_logs(N)
        parts = list(logW.values())
        parts.extend(self._seed_log(v, N) for v, _ in trie)
        if not parts:
            return -math.inf
        return float(np.logaddexp.reduce(np.array(parts)))

    # -- variable-length covering infimum ------------------------------------

    def _cfactors(self, alpha: float, depth: int, full_graph: bool):
        """Per-remaining-depth cost of the optimal capped antichain below
        a node, per unit of the node's own weight, with the fraction of
        that cost carried by nodes sitting at the depth cap.

        Returns (c, f): lists indexed by remaining depth 0..depth, each a
        vector over states.  Cached per (alpha, graph) and extended on
        demand: c[0] = 1 and c[d] = min(1, sum over allowed next symbols
        of exp(-alpha + window value) * c[d-1] at the successor state).
        """
        if full_graph and self.subset.kind == SubsetSpec.CYLINDERS:
            graph, live = self.A, np.ones(self.system.alphabet_size, bool)
            states, state_id = self.full_states, self.full_state_id
        else:
            graph, live = self.graph, self.live
            states, state_id = self.states, self.state_id
        key = (alpha, full_graph)
        if key not in self._cfactor_cache:
            trans = []
            for s in states:
                row = []
                for a in np.flatnonzero(graph[s[-1]]):
                    a = int(a)
                    if not live[a]:
                        continue
                    ns = (s + (a,))[-self.sdepth:]
                    rho = math.exp(-alpha + self.potential.value(
                        self._transition_window(s, a)))
                    row.append((state_id[ns], rho))
                trans.append(row)
            n = len(states)
            self._cfactor_cache[key] = (trans, [np.ones(n)], [np.ones(n)])
        trans, cs, fs = self._cfactor_cache[key]
        n = len(states)
        while len(cs) <= depth:
            c, f = cs[-1], fs[-1]
            nc = np.empty(n)
            nf = np.empty(n)
            for i in range(n):
                total = sum(rho * c[j] for j, rho in trans[i])
                capped = sum(rho * c[j] * f[j] for j, rho in trans[i])
                if 1.0 <= total:
                    nc[i], nf[i] = 1.0, 0.0
                else:
                    nc[i] = total
                    nf[i] = capped / total if total > 0 else 0.0
            cs.append(nc)
            fs.append(nf)
        return cs, fs

    def log_weight_m(self, alpha: float, N: int, cap: int) -> tuple[float, dict]:
        """Optimal covering weight for strings of length in [N, cap].

        The returned value is an upper bound on the true infimum over all
        covering families (which allows unbounded lengths); the details
        report how much of the optimum sits at the cap.
        """
        if N < 1:
            raise ValueError("N must be >= 1")
        if cap < N:
            raise ValueError("depth cap must be >= N")
        details = {"cap": cap, "upper_bound": True, "cap_mass": 0.0}
        if self.subset.is_empty:
            return -math.inf, details
        logW, trie = self._entry_logs(N)
        if trie:
            deepest = max((len(u) - self.t + 1) for _, us in trie for u in us)
            if cap < deepest:
                cap = deepest
                details["cap"] = cap
        cs, fs = self._cfactors(alpha, cap - N, full_graph=False)
        if self.subset.kind == SubsetSpec.CYLINDERS:
            cs_full, fs_full = self._cfactors(alpha, cap - N, full_graph=True)
            full_id = self.full_state_id
        else:
            cs_full, fs_full = cs, fs
            full_id = self.state_id

        shift = max(logW.values(), default=-math.inf)
        if trie:
            shift = max(shift, max(self._seed_log(v, N) for v, _ in trie))
        if shift == -math.inf:
            return -math.inf, details
        total = 0.0
        capped = 0.0
        c_entry, f_entry = cs[cap - N], fs[cap - N]
        for s, lw in logW.items():
            idx = full_id[s] if self.subset.kind == SubsetSpec.CYLINDERS \
                else self.state_id[s]
            cvec = cs_full[cap - N] if self.subset.kind == SubsetSpec.CYLINDERS \
                else c_entry
            fvec = fs_full[cap - N] if self.subset.kind == SubsetSpec.CYLINDERS \
                else f_entry
            w = math.exp(lw - shift) * cvec[idx]
            total += w
            capped += w * fvec[idx]
        for v, us in trie:
            cost, fcap = self._trie_cost(v, tuple(sorted(us)), alpha, N, cap,
                                         cs_full, fs_full, full_id, shift)
            total += cost
            capped += cost * fcap
        if total <= 0.0:
            return -math.inf, details
        details["cap_mass"] = capped / total
        return math.log(total) + shift - alpha * N, details

    def _trie_cost(self, v: tuple, us: tuple, alpha: float, N: int, cap: int,
                   cs_full, fs_full, full_id, shift: float) -> tuple[float, float]:
        """Explicit tree walk above listed cylinder words deeper than the
        entry level.  Costs are in units of exp(shift - alpha*N), matching
        the caller's normalization."""
        m = len(v) - self.t + 1
        own = math.exp(self._seed_log(v, m) - shift - alpha * (m - N))
        if any(len(u) == len(v) for u in us):
            # v is itself a listed word (antichain: then the only one
            # here); the subtree below it lies inside the subset
            idx = full_id[v[-self.sdepth:]]
            cvec, fvec = cs_full[cap - m], fs_full[cap - m]
            return own * cvec[idx], (fvec[idx] if cvec[idx] < 1.0 else 0.0)
        children: dict[int, list] = {}
        for u in us:
            children.setdefault(u[len(v)], []).append(u)
        child_cost = 0.0
        child_cap = 0.0
        for a, subus in children.items():
            cc, cf = self._trie_cost(v + (a,), tuple(subus), alpha, N, cap,
                                     cs_full, fs_full, full_id, shift)
            child_cost += cc
            child_cap += cc * cf
        if own <= child_cost:
            return own, 0.0
        return child_cost, (child_cap / child_cost if child_cost > 0 else 0.0)


def log_lambda_n(subset: SubsetSpec, potential: Potential, cover: Cover,
                 N: int) -> float:
    """log of the minimal fixed-length covering sum (see module docstring)."""
    return _StringCalculus(subset, potential, cover).log_lambda(N)


def lambda_n(subset: SubsetSpec, potential: Potential, cover: Cover,
             N: int) -> float:
    """Minimal covering sum over strings of length exactly N.

    Monotone under shrinking the subset; 0 for an empty subset.
    """
    return math.exp(log_lambda_n(subset, potential, cover, N))


def weight_m(subset: SubsetSpec, alpha: float, potential: Potential,
             cover: Cover, N: int, depth_cap: int | None = None,
             return_details: bool = False):
    """Optimal covering weight over strings of length >= N.

    Computed exactly as the cheapest prefix-free antichain in the
    cylinder tree with string lengths in [N, depth_cap] (default N + 8).
    Always an upper bound for the unbounded-depth infimum; the details
    record the fraction of the optimum sitting at the cap, which tells
    whether deeper antichains were still winning.  When the subset lists
    cylinder words deeper than the cap, the cap is raised to reach them
    (and reported in the details), since the covering structure below
    the entry level is pinned by those words anyway.
    """
    cap = depth_cap if depth_cap is not None else N + 8
    calc = _StringCalculus(subset, potential, cover)
    logm, details = calc.log_weight_m(alpha, N, cap)
    value = math.exp(logm)
    if return_details:
        return value, details
    return value


def capacity_pressures(subset: SubsetSpec, potential: Potential, cover: Cover,
                       N_max: int) -> tuple[PressureEstimate, PressureEstimate]:
    """Lower/upper capacity pressure estimates from the covering sums.

    The limit values are bracketed by the extremes of the successive
    differences of log Lambda over the window [N_max/2, N_max]; the raw
    sequence (1/N) log Lambda and its least-squares slope are kept in the
    diagnostics (the raw sequence converges only at rate 1/N, which is
    why the differenced estimator is the reported value).
    """
    if N_max < 8:
        raise ValueError("N_max must be >= 8")
    calc = _StringCalculus(subset, potential, cover)
    n_half = max(2, N_max // 2)
    ns = list(range(n_half - 1, N_max + 1))
    loglam = {N: calc.log_lambda(N) for N in ns}
    if all(v == -math.inf for v in loglam.values()):
        diag = {"degenerate": True, "rows": []}
        lo = PressureEstimate(-math.inf, cover.depth, (n_half, N_max),
                              (-math.inf, -math.inf), "CP_lower", dict(diag))
        hi = PressureEstimate(-math.inf, cover.depth, (n_half, N_max),
                              (-math.inf, -math.inf), "CP_upper", dict(diag))
        return lo, hi
    slopes = {N: loglam[N] - loglam[N - 1] for N in ns[1:]}
    window = [N for N in slopes if N >= n_half]
    svals = [slopes[N] for N in window]
    rows = [(N, loglam[N], slopes[N]) for N in window]
    raw = [loglam[N] / N for N in window]
    top = window[len(window) // 2:]
    fit = np.polyfit(top, [loglam[N] for N in top], 1)[0] if len(top) > 1 \
        else svals[-1]
    diag = {
        "rows": rows,
        "raw_over_N": (min(raw), max(raw)),
        "cesaro_slope": float(fit),
    }
    lo = PressureEstimate(min(svals), cover.depth, (n_half, N_max),
                          (min(svals), max(svals)), "CP_lower", dict(diag))
    hi = PressureEstimate(max(svals), cover.depth, (n_half, N_max),
                          (min(svals), max(svals)), "CP_upper", dict(diag))
    return lo, hi


def _slope(ns, values) -> float:
    return float(np.polyfit(ns, values, 1)[0])


def critical_alpha(subset: SubsetSpec, potential: Potential, cover: Cover,
                   tol: float, n_range: tuple = (8, 20),
                   depth_margin: int = 8) -> PressureEstimate:
    """Topological pressure of the subset: bisection on the exponent.

    For each candidate alpha the covering weight is computed across the
    N-window and classified by the least-squares slope of its log over
    the top half: positive slope means the weight diverges (alpha below
    the critical value), negative means it vanishes.  The bracket is
    narrowed until its width is at most tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if subset.is_empty:
        return PressureEstimate(-math.inf, cover.depth, n_range,
                                (-math.inf, -math.inf), "P",
                                {"degenerate": True})
    calc = _StringCalculus(subset, potential, cover)
    n_lo, n_hi = n_range
    ns = list(range(n_lo, n_hi + 1))
    top = ns[len(ns) // 2:]

    gvals = list(potential.table.values())
    k = cover.system.alphabet_size
    alpha_lo = min(gvals) - math.log(k) - 1.0
    alpha_hi = max(gvals) + math.log(k) + 1.0

    trace = []

    def classify(alpha: float) -> float:
        logs = []
        for N in top:
            lm, _ = calc.log_weight_m(alpha, N, N + depth_margin)
            if lm == -math.inf:
                raise InconclusiveError("inconclusive-at-depth: covering "
                                        "weight vanished identically")
            logs.append(lm)
        s = _slope(top, logs)
        trace.append((alpha, s))
        return s

    slope_lo = classify(alpha_lo)
    slope_hi = classify(alpha_hi)
    if not (slope_lo > 0 > slope_hi):
        raise InconclusiveError(
            "inconclusive: growth classification is not monotone across "
            f"the initial bracket (slopes {slope_lo:.3g}, {slope_hi:.3g})")
    threshold = 1e-3 * max(1.0, abs(slope_lo), abs(slope_hi))
    weak = 0
    steps = math.ceil(math.log2((alpha_hi - alpha_lo) / tol)) + 1
    for _ in range(steps):
        if alpha_hi - alpha_lo <= tol:
            break
        mid = 0.5 * (alpha_lo + alpha_hi)
        s = classify(mid)
        if abs(s) < threshold:
            weak += 1
        if s > 0:
            alpha_lo = mid
        else:
            alpha_hi = mid
    value = 0.5 * (alpha_lo + alpha_hi)
    diag = {
        "classification_threshold": threshold,
        "weak_classifications": weak,
        "trace": trace,
        "depth_margin": depth_margin,
    }
    return PressureEstimate(value, cover.depth, (n_lo, n_hi),
                            (alpha_lo, alpha_hi), "P", diag)


def pressure_refined(subset: SubsetSpec, potential: Potential, depths,
                     N_max: int, tol: float) -> PressureEstimate:
    """Pressure across a refining sequence of cover depths.

    For locally constant potentials the per-depth estimates are constant
    once the cover depth reaches the potential depth (the oscillation
    within cover elements, the refinement error term, is then zero); the
    diagnostics record the per-depth values, their deltas and the
    oscillation bound, and a non-Cauchy sequence raises a warning flag.
    """
    depths = list(depths)
    if depths != sorted(depths):
        raise ValueError("depths must be increasing")
    system = subset.system
    n_range = (max(4, N_max // 2), N_max)
    per_depth = []
    last = None
    for t in depths:
        cover = Cover(system, t)
        last = critical_alpha(subset, potential, cover, tol, n_range=n_range)
        per_depth.append((t, last.value, cover.oscillation(potential)))
    deltas = [abs(b[1] - a[1]) for a, b in zip(per_depth, per_depth[1:])]
    gammas = [g for _, _, g in per_depth]
    converged = all(d <= g + 2 * tol for d, g in zip(deltas, gammas))
    if not converged:
        warnings.warn("pressure_refined: per-depth estimates are not Cauchy "
                      "within the oscillation bounds", RuntimeWarning)
    diag = {
        "per_depth": per_depth,
        "deltas": deltas,
        "oscillation_bounds": gammas,
        "convergence_warning": not converged,
    }
    diag.update({k: v for k, v in last.diagnostics.items()
                 if k in ("classification_threshold", "weak_classifications")})
    return PressureEstimate(last.value, per_depth[-1][0], n_range,
                            last.bracket, "P", diag)
