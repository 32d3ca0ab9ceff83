"""Seeded Monte-Carlo runs, regret accounting, aggregation and exact audits."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds as B
from .chain import chi_squared, distribution_path, fill_bound, lambda2_M, stationary_distribution
from .environment import discount_mass, discount_weights, gaps, pull_arm
from .exceptions import UninitializedArm
from .policies import (EXP3, POLICIES, UCB1, EpochGreedy, EpochUCB, EpsilonGreedy, LinearQ,
                       UCBTuned)
from .schedule import EpochSchedule
from .utils import replication_seed

ITERATION_POLICIES = ("ucb1", "ucb_tuned", "eps_greedy", "exp3", "linq")
EPOCH_POLICIES = ("epochucb", "epochgreedy")
DEFAULT_C_PRIME_GRID = (8.1, 9.0, 12.0, 16.0, 32.0)


# ---------------------------------------------------------------------------
# traces

@dataclass
class RunTrace:
    """Per-epoch log of one seeded run.

    For iteration-granular policies every "epoch" is a single iteration.
    ``regret_increment`` is ``mu* - reward`` per record; the per-iteration
    projection multiplies it by the epoch length.
    """

    policy: str
    granularity: str
    mu_star: float
    arms: np.ndarray
    taus: np.ndarray
    rewards: np.ndarray
    n_arms: int
    seed: int = 0
    instance_id: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.arms.size

    @property
    def cumulative_iterations(self):
        return np.cumsum(self.taus)

    @property
    def regret_increment(self):
        return self.mu_star - self.rewards

    @property
    def cumulative_regret(self):
        """Epoch regret ``k mu* - sum_{i <= k} r_i`` after each record."""
        return np.cumsum(self.regret_increment)

    @property
    def pull_counts(self):
        return np.bincount(self.arms, minlength=self.n_arms)

    def pulls_by(self, n):
        """``T_j(n)``: epochs spent on each arm among the first ``n``."""
        return np.bincount(self.arms[:n], minlength=self.n_arms)


def _spawn(seed):
    ss = np.random.SeedSequence(seed)
    env_ss, pol_ss = ss.spawn(2)
    return np.random.default_rng(env_ss), np.random.default_rng(pol_ss)


def run_epoch_policy(policy, instance, n_epochs=None, seed=0, *, max_iterations=None,
                     mode="distribution"):
    """Run an epoch-mixing policy for ``n_epochs`` epochs or until ``max_iterations``.

    With an iteration budget the last epoch is cut short so that the run
    ends exactly on the budget.
    """
    if (n_epochs is None) == (max_iterations is None):
        raise ValueError("give exactly one of n_epochs and max_iterations")
    env_rng, pol_rng = _spawn(seed)
    policy.reset(instance.m, pol_rng)
    beta = np.array(instance.beta1, dtype=float)
    arms, taus, rewards = [], [], []
    used = 0
    k = 0
    while True:
        if n_epochs is not None and k >= n_epochs:
            break
        if max_iterations is not None and used >= max_iterations:
            break
        k += 1
        arm = policy.select(k)
        tau = policy.epoch_length(arm)
        if max_iterations is not None:
            tau = min(tau, max_iterations - used)
        out = pull_arm(instance, arm, beta, tau, env_rng, mode=mode)
        beta = out.final_beta
        policy.update(arm, out.smoothed_reward)
        arms.append(arm)
        taus.append(tau)
        rewards.append(out.smoothed_reward)
        used += tau
    return RunTrace(type(policy).__name__, "epoch", instance.mu_star, np.array(arms, dtype=np.int64),
                    np.array(taus, dtype=np.int64), np.array(rewards), instance.m, seed,
                    instance.name)


def _reward_block(instance, rng, size):
    """Pre-drawn rewards ``R[t, j, s]`` for every arm/state pair, in a fixed order."""
    R = np.empty((size, instance.m, instance.n_states))
    for j, row in enumerate(instance.kernels):
        for s, kern in enumerate(row):
            R[:, j, s] = kern.sample(rng, size)
    return R


def run_iteration_policy(policy, instance, n_iterations, seed=0, *, mode="distribution",
                         block=4096):
    """Run a per-iteration policy; the state distribution advances one step per iteration.

    Environment randomness is drawn in blocks: one state uniform per
    iteration and one reward for every (arm, state) pair, of which the
    realized pair is used.  This keeps the stream independent of the
    policy's choices.
    """
    env_rng, pol_rng = _spawn(seed)
    if isinstance(policy, LinearQ):
        policy.reset(instance.m, pol_rng, n_states=instance.n_states)
    else:
        policy.reset(instance.m, pol_rng)
    S = instance.n_states
    Ps = instance.P
    cum_rows = [np.cumsum(P, axis=1) for P in Ps]
    beta = np.array(instance.beta1, dtype=float)
    state = None
    if mode == "trajectory":
        state = min(int(np.searchsorted(np.cumsum(beta), env_rng.random(), side="right")), S - 1)
    elif mode != "distribution":
        raise ValueError(f"unknown mode {mode!r}")
    arms = np.empty(n_iterations, dtype=np.int64)
    rewards = np.empty(n_iterations)
    uses_state = policy.uses_state
    done = 0
    while done < n_iterations:
        size = min(block, n_iterations - done)
        U = env_rng.random(size)
        R = _reward_block(instance, env_rng, size)
        for i in range(size):
            t = done + i + 1
            arm = policy.select(t, beta=beta) if uses_state else policy.select(t)
            if mode == "distribution":
                c = np.cumsum(beta)
                s = min(int(np.searchsorted(c, U[i], side="right")), S - 1)
                nxt = beta @ Ps[arm]
                nxt /= nxt.sum()
            else:
                s = state
                state = min(int(np.searchsorted(cum_rows[arm][s], U[i], side="right")), S - 1)
                nxt = np.zeros(S)
                nxt[state] = 1.0
            r = R[i, arm, s]
            if uses_state:
                policy.update(arm, r, beta=beta, next_beta=nxt, t=t)
            else:
                policy.update(arm, r)
            beta = nxt
            arms[t - 1] = arm
            rewards[t - 1] = r
        done += size
    return RunTrace(type(policy).__name__, "iteration", instance.mu_star, arms,
                    np.ones(n_iterations, dtype=np.int64), rewards, instance.m, seed, instance.name)


# ---------------------------------------------------------------------------
# policy construction with oracle defaults

def tune_greedy_c_prime(instance, schedule, n_epochs, grid=DEFAULT_C_PRIME_GRID, reps=5,
                        master_seed=0, d=None):
    """Pick ``c'`` from ``grid`` minimizing mean EpochGreedy regret with ``c = c' nu^2``."""
    inputs = B.BoundInputs.from_instance(instance, schedule)
    d = _min_gap(instance) if d is None else d
    kap = B.kappa_from_inputs(inputs, n_epochs)
    best, best_regret = None, math.inf
    for cp in grid:
        cfg = B.GreedyConfig.from_theory(kap, d, cp)
        total = 0.0
        for r in range(reps):
            tr = run_epoch_policy(EpochGreedy(schedule, cfg), instance, n_epochs,
                                  replication_seed(master_seed, r))
            total += tr.cumulative_regret[-1]
        if total / reps < best_regret:
            best, best_regret = cp, total / reps
    return best


def _min_gap(instance):
    g = gaps(instance)
    g = g[g > 0]
    return float(g.min()) if g.size else 1.0


def make_policy(policy_id, instance, *, schedule=None, horizon=None, **params):
    """Build a policy, filling oracle defaults from the instance.

    Parameters
    ----------
    policy_id : str
        One of ``POLICIES``.
    horizon : int
        Epoch count for epoch policies, iteration count otherwise.  Used
        for ``kappa`` (EpochGreedy), EXP3's mixing rate and LinearQ's
        exploration decay.
    params : dict
        ``c``, ``d``, ``c_prime`` for the greedy policies; ``gamma`` for
        EXP3; ``gamma_rl`` for LinearQ; ``use_bound`` for EpochUCB.
    """
    schedule = schedule or EpochSchedule()
    if policy_id == "epochucb":
        bound = B.BoundInputs.from_instance(instance, schedule) if params.get("use_bound", True) else None
        return EpochUCB(schedule, bound)
    if policy_id == "epochgreedy":
        d = params.get("d") or _min_gap(instance)
        c = params.get("c")
        c_prime = params.get("c_prime", 9.0)
        if c is not None:
            cfg = B.GreedyConfig(c=float(c), d=d, c_prime=9.0 if c_prime == "auto" else c_prime,
                                 strict=False)
        else:
            if c_prime == "auto":
                c_prime = tune_greedy_c_prime(instance, schedule, horizon, d=d)
            inputs = B.BoundInputs.from_instance(instance, schedule)
            cfg = B.GreedyConfig.from_theory(B.kappa_from_inputs(inputs, horizon), d, c_prime)
        return EpochGreedy(schedule, cfg)
    if policy_id == "ucb1":
        return UCB1()
    if policy_id == "ucb_tuned":
        return UCBTuned()
    if policy_id == "eps_greedy":
        return EpsilonGreedy(c=params.get("c", 1.0), d=params.get("d") or _min_gap(instance))
    if policy_id == "exp3":
        return EXP3(gamma=params.get("gamma"), horizon=horizon)
    if policy_id == "linq":
        return LinearQ(gamma_rl=params.get("gamma_rl", 0.9), horizon=horizon)
    raise KeyError(f"unknown policy {policy_id!r}; choose from {sorted(POLICIES)}")


def run_policy(policy, instance, horizon, random_state=0, **kw):
    if policy.granularity == "epoch":
        return run_epoch_policy(policy, instance, horizon, random_state or 0, **kw)
    return run_iteration_policy(policy, instance, horizon, random_state or 0, **kw)


def run_replications(policy_id, instance, reps, master_seed=0, *, schedule=None, n_epochs=None,
                     iterations=None, mode="distribution", **params):
    """Run ``reps`` independent replications; stream ``r`` is seeded by ``mix64(master_seed, r)``.

    Epoch policies run ``n_epochs`` epochs, or exactly ``iterations``
    iterations when only that is given.
    """
    traces = []
    epoch = policy_id in EPOCH_POLICIES
    horizon = n_epochs if epoch and n_epochs is not None else iterations
    if epoch and horizon is None:
        raise ValueError("need n_epochs or iterations")
    if epoch and n_epochs is None:
        # kappa and c' search need an epoch count; a run of `iterations`
        # iterations has at most this many epochs
        horizon = iterations
    template = make_policy(policy_id, instance, schedule=schedule, horizon=horizon, **params)
    for r in range(reps):
        seed = replication_seed(master_seed, r)
        pol = _fresh(template)
        if epoch:
            if n_epochs is not None:
                tr = run_epoch_policy(pol, instance, n_epochs, seed, mode=mode)
            else:
                tr = run_epoch_policy(pol, instance, None, seed, max_iterations=iterations, mode=mode)
        else:
            tr = run_iteration_policy(pol, instance, iterations, seed, mode=mode)
        tr.policy = policy_id
        tr.meta["replication"] = r
        traces.append(tr)
    return traces


def _fresh(policy):
    from sklearn.base import clone
    return clone(policy, safe=False)


# ---------------------------------------------------------------------------
# regret curves and aggregation

@dataclass(frozen=True)
class AggregateCurve:
    x: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n: int
    label: str = ""

    def at(self, xv):
        i = int(np.searchsorted(self.x, xv, side="right")) - 1
        return float(self.mean[max(i, 0)])

    def rows(self):
        return [(int(a), repr(float(b)), repr(float(c))) for a, b, c in zip(self.x, self.mean, self.stderr)]


def iteration_regret_projection(trace, grid=None):
    """Cumulative regret against cumulative iterations.

    Each epoch contributes ``tau_k (mu* - r_k)`` at its final iteration.
    Under time-averaged feedback this equals the sum of per-iteration
    regrets exactly; under discounting it is an approximation.  With a
    ``grid`` the step function is sampled at those iteration counts.
    """
    x = trace.cumulative_iterations
    y = np.cumsum(trace.taus * trace.regret_increment)
    if grid is None:
        return x, y
    idx = np.searchsorted(x, grid, side="right") - 1
    return np.asarray(grid), np.where(idx >= 0, y[np.maximum(idx, 0)], 0.0)


def aggregate(curves, x, label=""):
    """Mean and standard error (sample std / sqrt(R)) across replications."""
    Y = np.vstack(curves)
    R = Y.shape[0]
    sd = Y.std(axis=0, ddof=1) if R > 1 else np.zeros(Y.shape[1])
    return AggregateCurve(np.asarray(x), Y.mean(axis=0), sd / math.sqrt(R), R, label)


def aggregate_epoch_regret(traces, label=""):
    n = min(t.n for t in traces)
    return aggregate([t.cumulative_regret[:n] for t in traces], np.arange(1, n + 1), label)


def aggregate_iteration_regret(traces, grid, label=""):
    return aggregate([iteration_regret_projection(t, grid)[1] for t in traces], grid, label)


def late_slope(curve_y, x):
    """``(R(B) - R(0.9 B)) / (0.1 B)`` on a cumulative curve sampled at ``x``."""
    x = np.asarray(x)
    Bv = x[-1]
    i = int(np.searchsorted(x, 0.9 * Bv, side="left"))
    return float((curve_y[-1] - curve_y[i]) / (Bv - x[i]))


def estimate_suboptimal_plays(traces, n=None):
    """Mean and standard error of ``T_j(n)`` across replications."""
    n = n or min(t.n for t in traces)
    counts = np.array([t.pulls_by(n) for t in traces], dtype=float)
    R = counts.shape[0]
    se = counts.std(axis=0, ddof=1) / math.sqrt(R) if R > 1 else np.zeros(counts.shape[1])
    return counts.mean(axis=0), se


def selection_frequency(traces, arm, n=None):
    """Per-epoch frequency of playing ``arm`` and its standard error."""
    n = n or min(t.n for t in traces)
    ind = np.array([t.arms[:n] == arm for t in traces], dtype=float)
    R = ind.shape[0]
    p = ind.mean(axis=0)
    return p, np.sqrt(p * (1 - p) / R)


# ---------------------------------------------------------------------------
# exact audits

@dataclass
class AuditReport:
    checks: int = 0
    violations: list = field(default_factory=list)
    max_ratio: float = 0.0
    min_slack: float = math.inf
    by_kind: dict = field(default_factory=dict)

    def record(self, kind, lhs, rhs, inputs, atol=1e-12):
        self.checks += 1
        entry = self.by_kind.setdefault(kind, {"checks": 0, "violations": 0, "min_slack": math.inf})
        entry["checks"] += 1
        slack = rhs - lhs
        entry["min_slack"] = min(entry["min_slack"], slack)
        self.min_slack = min(self.min_slack, slack)
        if rhs > atol:  # ratios of rounding-level quantities carry no information
            self.max_ratio = max(self.max_ratio, lhs / rhs)
        if lhs > rhs + atol * max(1.0, abs(rhs)):
            entry["violations"] += 1
            if len(self.violations) < 100:
                self.violations.append({"kind": kind, "lhs": lhs, "rhs": rhs, **inputs})

    @property
    def ok(self):
        return all(v["violations"] == 0 for v in self.by_kind.values())

    def merge(self, other):
        self.checks += other.checks
        self.violations.extend(other.violations[: max(0, 100 - len(self.violations))])
        self.max_ratio = max(self.max_ratio, other.max_ratio)
        self.min_slack = min(self.min_slack, other.min_slack)
        for k, v in other.by_kind.items():
            e = self.by_kind.setdefault(k, {"checks": 0, "violations": 0, "min_slack": math.inf})
            e["checks"] += v["checks"]
            e["violations"] += v["violations"]
            e["min_slack"] = min(e["min_slack"], v["min_slack"])
        return self

    def to_dict(self):
        return {"ok": self.ok, "checks": self.checks, "max_ratio": self.max_ratio,
                "min_slack": self.min_slack, "by_kind": self.by_kind,
                "violations": self.violations}


def audit_betas(instance):
    """State-space corners plus the instance's own initial and uniform distributions."""
    S = instance.n_states
    out = [np.eye(S)[s] for s in range(S)]
    out.append(np.array(instance.beta1))
    out.append(np.full(S, 1.0 / S))
    return out


def audit_lemma1(instance, taus=range(1, 51), gammas=(0.5, 0.9, 1.0), betas=None, report=None):
    """Check ``|mu_j - E[r | beta]| <= C_j Upsilon_j(tau) / S(tau)`` exactly."""
    report = report or AuditReport()
    betas = audit_betas(instance) if betas is None else betas
    taus = list(taus)
    tmax = max(taus)
    means = instance.kernel_means
    for j in range(instance.m):
        mu = instance.mus[j]
        per_beta = [distribution_path(b, instance.P[j], tmax - 1) @ means[j] for b in betas]
        for g in gammas:
            stats = instance.stats(g)
            branch = B.select_branch(stats, g)
            sj = stats[j]
            for tau in taus:
                w = discount_weights(g, tau)
                Sk = discount_mass(g, tau)
                rhs = sj.C * B.upsilon(sj, g, tau, branch) / Sk
                for bi, e in enumerate(per_beta):
                    lhs = abs(mu - float(w @ e[:tau]) / Sk)
                    report.record("lemma1", lhs, rhs, {"instance": instance.name, "arm": j,
                                                       "gamma": g, "tau": tau, "beta": bi})
    return report


def _schedule_sequences(m, T, rng):
    seqs = {"round_robin": [i % m for i in range(T)],
            "random": [int(a) for a in rng.integers(m, size=T)]}
    for j in range(m):
        seqs[f"only_{j}"] = [j] * T
    return seqs


def audit_lemma2(instance, T=200, gammas=(0.5, 0.9, 1.0), schedules=((1, 1), (40, 1)),
                 seed=0, report=None):
    """Check ``|mu_j - mean_i E[r_i]| <= L_j(T_j) / T_j`` along fixed arm sequences.

    The state distribution is carried across epochs, so each epoch of
    arm ``j`` starts wherever the other arms left it.  Every prefix is
    checked.
    """
    report = report or AuditReport()
    rng = np.random.default_rng(seed)
    m = instance.m
    means = instance.kernel_means
    seqs = _schedule_sequences(m, T, rng)
    for (tau0, zeta) in schedules:
        sched = EpochSchedule(tau0, zeta)
        inputs = {g: B.BoundInputs.from_instance(instance, sched, g) for g in gammas}
        for name, seq in seqs.items():
            beta = np.array(instance.beta1, dtype=float)
            pulls = np.zeros(m, dtype=np.int64)
            sums = {g: np.zeros(m) for g in gammas}
            for arm in seq:
                tau = sched.length(pulls[arm])
                path = distribution_path(beta, instance.P[arm], tau)
                e = path[:-1] @ means[arm]
                beta = path[-1]
                pulls[arm] += 1
                Tj = int(pulls[arm])
                for g in gammas:
                    sums[g][arm] += float(discount_weights(g, tau) @ e) / discount_mass(g, tau)
                    lhs = abs(instance.mus[arm] - sums[g][arm] / Tj)
                    rhs = inputs[g].L(arm, Tj) / Tj
                    report.record("lemma2", lhs, rhs, {"instance": instance.name, "arm": arm,
                                                       "gamma": g, "tau0": tau0, "zeta": zeta,
                                                       "schedule": name, "T": Tj})
    return report


def audit_fill(P, betas=None, ns=range(1, 51), report=None, name=""):
    """Check ``4 ||beta P^n - pi||_1^2 <= chi0^2 lambda2(M)^n`` (the l1 reading)."""
    report = report or AuditReport()
    pi = stationary_distribution(P)
    lam2 = lambda2_M(P, pi)
    S = P.shape[0]
    betas = [np.eye(S)[s] for s in range(S)] if betas is None else betas
    ns = list(ns)
    for bi, b in enumerate(betas):
        path = distribution_path(b, P, max(ns))
        chi0 = chi_squared(b, pi)
        for n in ns:
            lhs = 4.0 * float(np.abs(path[n] - pi).sum()) ** 2
            rhs = 4.0 * fill_bound(chi0, lam2, n)
            report.record("fill_l1", lhs, rhs, {"chain": name, "beta": bi, "n": n})
    return report


def audit_fill_tv(P, betas=None, ns=range(1, 51), report=None, name=""):
    """Total-variation form ``4 ||beta P^n - pi||_TV^2 <= chi0^2 lambda2(M)^n`` (Fill's own statement)."""
    report = report or AuditReport()
    pi = stationary_distribution(P)
    lam2 = lambda2_M(P, pi)
    S = P.shape[0]
    betas = [np.eye(S)[s] for s in range(S)] if betas is None else betas
    for bi, b in enumerate(betas):
        path = distribution_path(b, P, max(ns))
        chi0 = chi_squared(b, pi)
        for n in ns:
            tv = 0.5 * float(np.abs(path[n] - pi).sum())
            report.record("fill_tv", 4.0 * tv * tv, chi0 * lam2 ** n, {"chain": name, "beta": bi, "n": n})
    return report


def audit_inequalities(instance, taus=range(1, 51), gammas=(0.5, 0.9, 1.0), T=200,
                       schedules=((1, 1), (40, 1)), seed=0, fill_norm="tv"):
    """Per-epoch, cumulative and Fill audits for one instance.

    ``fill_norm`` selects how the distance in Fill's bound is measured:
    ``"tv"`` (total variation, as Fill states it) or ``"l1"``.  The l1
    reading is four times stronger and fails on simple chains.
    """
    if fill_norm not in ("tv", "l1"):
        raise ValueError("fill_norm must be 'tv' or 'l1'")
    rep = audit_lemma1(instance, taus, gammas)
    audit_lemma2(instance, T, gammas, schedules, seed, report=rep)
    check = audit_fill_tv if fill_norm == "tv" else audit_fill
    for j, P in enumerate(instance.P):
        check(P, report=rep, name=f"{instance.name}/arm{j}")
    return rep


# ---------------------------------------------------------------------------
# constant-epoch failure demo

def constant_epoch_demo(instance, tau0=1, n_epochs=2000, reps=10, master_seed=0):
    """EpochUCB with ``zeta = 0`` against ``zeta = 1``: late per-epoch regret of each.

    Constant epochs never let the chain mix, so the observed rewards stay
    biased and per-epoch regret need not vanish.  This configuration is
    outside the supported regime and exists only as a demonstration.
    """
    out = {}
    for zeta in (0, 1):
        sched = EpochSchedule(tau0, zeta, allow_constant=True)
        traces = run_replications("epochucb", instance, reps, master_seed, schedule=sched,
                                  n_epochs=n_epochs)
        agg = aggregate_epoch_regret(traces)
        out[zeta] = late_slope(agg.mean, agg.x)
    return out
