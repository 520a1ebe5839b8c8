"""Simulated polling of a social-network API under per-credential rate budgets.

A single scheduler loop advances a controllable clock in fixed ticks. Each
:class:`PollTask` comes due once per period and turns into a queue of
requests (batches of account ids for detail lookups, cursor pages for id
lists). Requests are charged against fixed 15-minute windows per credential;
work that does not fit carries over to later windows. Every response is
appended to the snapshot log as a :class:`SnapshotRecord`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol, Sequence

from .errors import DataError, SourceError, ValidationError
from .graph_store import AccountAttributes, DirectedGraph, NodeId, load_attributes, load_edges

DETAILS = "account_details"
ID_LIST = "id_list"
RESOURCES = (DETAILS, ID_LIST)
WINDOW_SECONDS = 900
FANOUT_CAP = 100_000
COLLECT, SKIP = "collect", "skip"
HOUR = 3600


@dataclass(frozen=True)
class RateBudget:
    resource: str
    max_requests: int
    payload_cap: int
    window: int = WINDOW_SECONDS

    def __post_init__(self):
        if self.resource not in RESOURCES:
            raise ValidationError(f"unknown resource {self.resource!r}")
        if self.max_requests < 1 or self.payload_cap < 1 or self.window < 1:
            raise ValidationError("budget limits must be positive")


DEFAULT_BUDGETS = {
    DETAILS: RateBudget(DETAILS, 15, 100),
    ID_LIST: RateBudget(ID_LIST, 180, 5000),
}


def plan_requests(targets: Sequence, budget: RateBudget) -> list[tuple]:
    """Split ``targets`` into consecutive batches of at most ``payload_cap``."""
    cap = budget.payload_cap
    targets = list(targets)
    return [tuple(targets[i : i + cap]) for i in range(0, len(targets), cap)]


def cap_fanout(follower: NodeId, friend_count: int, follower_count: int, cap: int = FANOUT_CAP) -> str:
    """Second-order collection is skipped for accounts at or above ``cap`` links."""
    if friend_count < 0 or follower_count < 0:
        raise ValueError(f"{follower}: counts must be >= 0")
    return SKIP if friend_count >= cap or follower_count >= cap else COLLECT


# -- tasks ----------------------------------------------------------------------


@dataclass(frozen=True)
class PollTask:
    name: str
    resource: str
    period: int  # seconds
    selector: str
    lists: tuple = ()  # id-list kinds fetched per target

    def __post_init__(self):
        if self.period <= 0:
            raise ValidationError(f"task {self.name!r}: period must be > 0")
        if self.resource not in RESOURCES:
            raise ValidationError(f"task {self.name!r}: unknown resource {self.resource!r}")
        if self.selector not in SELECTORS:
            raise ValidationError(f"task {self.name!r}: unknown selector {self.selector!r}")
        if self.resource == ID_LIST and not self.lists:
            raise ValidationError(f"task {self.name!r}: id_list tasks need at least one list kind")
        for kind in self.lists:
            if kind not in ("followers", "friends"):
                raise ValidationError(f"task {self.name!r}: unknown list kind {kind!r}")

    def to_dict(self) -> dict:
        d = {"name": self.name, "resource": self.resource, "period_hours": self.period / HOUR,
             "selector": self.selector}
        if self.lists:
            d["lists"] = list(self.lists)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "PollTask":
        try:
            period = int(round(float(d["period_hours"]) * HOUR))
            return cls(d["name"], d["resource"], period, d["selector"], tuple(d.get("lists", ())))
        except KeyError as exc:
            raise ValidationError(f"task entry missing field {exc}") from None


class HarvestState:
    """What the harvester has learned so far; selectors read from here."""

    def __init__(self, honeypots: Iterable[NodeId], fanout_cap: int = FANOUT_CAP):
        self.honeypots = tuple(sorted(set(honeypots)))
        self.fanout_cap = fanout_cap
        self.details: dict[NodeId, dict] = {}
        self.lists: dict[tuple, frozenset] = {}  # (account, kind) -> latest complete id set

    def followers_of_honeypots(self) -> list:
        out = set()
        for h in self.honeypots:
            out |= self.lists.get((h, "followers"), frozenset())
        return sorted(out - set(self.honeypots))

    def capped_followers(self) -> list:
        keep = []
        for f in self.followers_of_honeypots():
            row = self.details.get(f)
            # without known counts the fan-out cannot be bounded, so wait for details
            if row is None or row.get("friends_count", "") == "" or row.get("followers_count", "") == "":
                continue
            if cap_fanout(f, int(row["friends_count"]), int(row["followers_count"]), self.fanout_cap) == COLLECT:
                keep.append(f)
        return keep

    def second_order(self) -> list:
        first = set(self.honeypots) | set(self.followers_of_honeypots())
        out = set()
        for f in self.followers_of_honeypots():
            out |= self.lists.get((f, "friends"), frozenset())
            out |= self.lists.get((f, "followers"), frozenset())
        return sorted(out - first)


SELECTORS: dict[str, Callable[[HarvestState], list]] = {
    "honeypots": lambda s: list(s.honeypots),
    "followers": HarvestState.followers_of_honeypots,
    "capped_followers": HarvestState.capped_followers,
    "second_order": HarvestState.second_order,
}


DEFAULT_TASKS = (
    PollTask("honeypot_details", DETAILS, 1 * HOUR, "honeypots"),
    PollTask("honeypot_followers", ID_LIST, 12 * HOUR, "honeypots", ("followers",)),
    PollTask("follower_details", DETAILS, 24 * HOUR, "followers"),
    PollTask("follower_links", ID_LIST, 24 * HOUR, "capped_followers", ("friends", "followers")),
    PollTask("second_order_details", DETAILS, 72 * HOUR, "second_order"),
)


# -- credentials and windows ----------------------------------------------------


@dataclass(frozen=True)
class Dispatch:
    ts: int
    credential: str
    resource: str
    window: int
    task: str
    size: int
    ok: bool


class CredentialPool:
    """Credentials are used in order; the pool moves to the next one only when
    the current credential has exhausted its window for that resource.

    Each (credential, resource) pair gets fixed windows anchored at its first use.
    """

    def __init__(self, credentials: Sequence[str], budgets: Mapping[str, RateBudget] = DEFAULT_BUDGETS):
        if not credentials:
            raise ValidationError("credential pool needs at least one credential")
        if len(set(credentials)) != len(credentials):
            raise ValidationError("duplicate credential ids")
        self.credentials = tuple(credentials)
        self.budgets = dict(budgets)
        self._current = {r: 0 for r in self.budgets}
        self._anchor: dict[tuple, int] = {}
        self._used: dict[tuple, int] = {}

    def window_of(self, credential: str, resource: str, now: int) -> int:
        anchor = self._anchor.get((credential, resource), now)
        return (now - anchor) // self.budgets[resource].window

    def remaining(self, credential: str, resource: str, now: int) -> int:
        w = self.window_of(credential, resource, now)
        return self.budgets[resource].max_requests - self._used.get((credential, resource, w), 0)

    def window_reset(self, credential: str, resource: str, now: int) -> int:
        anchor = self._anchor.get((credential, resource), now)
        size = self.budgets[resource].window
        return anchor + (self.window_of(credential, resource, now) + 1) * size

    def acquire(self, resource: str, now: int) -> tuple[str, int] | None:
        """Charge one request; returns (credential, window) or None if all are exhausted."""
        n = len(self.credentials)
        start = self._current[resource]
        for step in range(n):
            k = (start + step) % n
            cred = self.credentials[k]
            if self.remaining(cred, resource, now) > 0:
                self._current[resource] = k
                self._anchor.setdefault((cred, resource), now)
                w = self.window_of(cred, resource, now)
                key = (cred, resource, w)
                self._used[key] = self._used.get(key, 0) + 1
                return cred, w
        return None


# -- data sources ---------------------------------------------------------------


class DataSource(Protocol):
    def account_details(self, ids: Sequence[NodeId]) -> dict[NodeId, dict]:
        """Attribute rows for the ids that exist; unknown ids are left out."""

    def id_page(self, account: NodeId, kind: str, cursor: int, count: int) -> tuple[list, int | None] | None:
        """One page of an id list and the next cursor (None when done); None if unknown."""


class FixtureSource:
    """Serves canned data from a graph and attribute table.

    ``fail_calls`` holds zero-based call indices that raise :class:`SourceError`;
    ``fail_targets`` makes every call touching those ids fail.
    """

    def __init__(
        self,
        graph: DirectedGraph,
        attributes: Mapping[NodeId, AccountAttributes],
        fail_calls: Iterable[int] = (),
        fail_targets: Iterable[NodeId] = (),
    ):
        self.graph = graph
        self.attributes = dict(attributes)
        self.fail_calls = set(fail_calls)
        self.fail_targets = set(fail_targets)
        self.calls = 0

    def _maybe_fail(self, targets):
        k = self.calls
        self.calls += 1
        if k in self.fail_calls or self.fail_targets.intersection(targets):
            raise SourceError(f"injected failure on call {k}")

    def account_details(self, ids):
        self._maybe_fail(ids)
        return {i: self.attributes[i].to_row() for i in ids if i in self.attributes}

    def id_page(self, account, kind, cursor, count):
        self._maybe_fail([account])
        if account not in self.graph:
            return None
        ids = self.graph.in_neighbors(account) if kind == "followers" else self.graph.out_neighbors(account)
        ids = sorted(ids)
        page = ids[cursor : cursor + count]
        nxt = cursor + count if cursor + count < len(ids) else None
        return page, nxt


def load_fixture(fixture_dir, honeypots: Sequence[NodeId] | None = None) -> tuple[FixtureSource, list]:
    """Fixture directory layout: edges.csv, attributes.csv and (optionally) honeypots.txt."""
    d = Path(fixture_dir)
    missing = [n for n in ("edges.csv", "attributes.csv") if not (d / n).exists()]
    if honeypots is None and not (d / "honeypots.txt").exists():
        missing.append("honeypots.txt")
    if missing:
        raise DataError(f"fixture {d} is missing: {', '.join(missing)}")
    g = load_edges(d / "edges.csv")
    attrs = load_attributes(d / "attributes.csv")
    if honeypots is None:
        lines = (d / "honeypots.txt").read_text(encoding="utf-8").splitlines()
        honeypots = [s.strip() for s in lines if s.strip() and not s.startswith("#")]
    if not honeypots:
        raise DataError("no honeypot accounts given")
    return FixtureSource(g, attrs), list(honeypots)


# -- clock and records ----------------------------------------------------------


class SimClock:
    def __init__(self, start: int = 0):
        self.now = int(start)

    def advance(self, seconds: int) -> int:
        if seconds < 0:
            raise ValueError("the clock only moves forward")
        self.now += int(seconds)
        return self.now


@dataclass(frozen=True)
class SnapshotRecord:
    seq: int
    ts: int
    task: str
    target: NodeId
    payload: dict

    def to_json(self) -> str:
        return json.dumps(
            {"seq": self.seq, "ts": self.ts, "task": self.task, "target": self.target, "payload": self.payload},
            sort_keys=True,
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, line: str) -> "SnapshotRecord":
        d = json.loads(line)
        return cls(int(d["seq"]), int(d["ts"]), d["task"], d["target"], d["payload"])


def write_snapshots(records: Iterable[SnapshotRecord], path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")


def read_snapshots(path) -> list[SnapshotRecord]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"snapshot file not found: {path}")
    out = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(SnapshotRecord.from_json(line))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            raise DataError(f"malformed snapshot record at line {lineno}") from None
    return out


def replay_lists(records: Iterable[SnapshotRecord], kind: str = "followers") -> dict[NodeId, list]:
    """Rebuild complete id-list snapshots: account -> [(ts, frozenset), ...] in time order.

    Pages of one fetch share an execution number; a fetch counts only once
    its final page has been recorded.
    """
    pages: dict[tuple, dict] = {}
    for r in records:
        p = r.payload
        if p.get("list") != kind or "ids" not in p:
            continue
        key = (r.target, r.task, p["execution"])
        acc = pages.setdefault(key, {"ts": r.ts, "ids": set(), "final": False})
        acc["ids"].update(p["ids"])
        acc["final"] = acc["final"] or p["final"]
    out: dict[NodeId, list] = {}
    for (target, _, _), acc in sorted(pages.items(), key=lambda kv: (kv[1]["ts"], kv[0])):
        if acc["final"]:
            out.setdefault(target, []).append((acc["ts"], frozenset(acc["ids"])))
    return out


# -- scheduler ------------------------------------------------------------------


@dataclass
class _Unit:
    targets: tuple
    kind: str | None = None  # id-list kind, None for detail batches
    cursor: int = 0
    page: int = 0
    attempts: int = 0
    not_before: int = 0


@dataclass
class _Execution:
    task: PollTask
    index: int  # position in the task list, breaks priority ties
    number: int
    due: int
    units: list | None = None  # built when the execution first gets to dispatch
    started: int | None = None


@dataclass
class HarvestConfig:
    tasks: tuple = DEFAULT_TASKS
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    credentials: tuple = ("key0",)
    tick: int = 60
    max_attempts: int = 3
    backoff: int = 60
    fanout_cap: int = FANOUT_CAP

    def to_dict(self) -> dict:
        return {
            "tasks": [t.to_dict() for t in self.tasks],
            "budgets": {
                r: {"max_requests": b.max_requests, "payload_cap": b.payload_cap, "window_seconds": b.window}
                for r, b in sorted(self.budgets.items())
            },
            "credentials": list(self.credentials),
            "tick_seconds": self.tick,
            "max_attempts": self.max_attempts,
            "backoff_seconds": self.backoff,
            "fanout_cap": self.fanout_cap,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "HarvestConfig":
        base = cls()
        budgets = dict(base.budgets)
        for r, b in d.get("budgets", {}).items():
            budgets[r] = RateBudget(r, int(b["max_requests"]), int(b["payload_cap"]),
                                    int(b.get("window_seconds", WINDOW_SECONDS)))
        tasks = tuple(PollTask.from_dict(t) for t in d["tasks"]) if "tasks" in d else base.tasks
        cfg = cls(
            tasks=tasks,
            budgets=budgets,
            credentials=tuple(d.get("credentials", base.credentials)),
            tick=int(d.get("tick_seconds", base.tick)),
            max_attempts=int(d.get("max_attempts", base.max_attempts)),
            backoff=int(d.get("backoff_seconds", base.backoff)),
            fanout_cap=int(d.get("fanout_cap", base.fanout_cap)),
        )
        if not cfg.tasks:
            raise ValidationError("config needs at least one task")
        if cfg.tick < 1 or cfg.max_attempts < 1 or cfg.backoff < 0:
            raise ValidationError("tick, max_attempts and backoff must be positive")
        return cfg


def load_config(path) -> HarvestConfig:
    path = Path(path)
    if not path.exists():
        raise DataError(f"config file not found: {path}")
    try:
        return HarvestConfig.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise DataError(f"malformed harvester config {path}: {exc}") from None


@dataclass
class HarvestResult:
    records: list
    dispatches: list
    executions: dict  # task name -> execution start times
    skipped: dict  # task name -> due times dropped because the previous run was unfinished
    pending: int  # requests still queued when the run ended

    def window_usage(self) -> dict:
        usage: dict[tuple, int] = {}
        for d in self.dispatches:
            key = (d.credential, d.resource, d.window)
            usage[key] = usage.get(key, 0) + 1
        return usage

    def stats(self) -> dict:
        by_res = {r: 0 for r in RESOURCES}
        failed = 0
        for d in self.dispatches:
            by_res[d.resource] += 1
            failed += not d.ok
        usage = self.window_usage()
        return {
            "records": len(self.records),
            "requests": by_res,
            "failed_requests": failed,
            "failure_records": sum(1 for r in self.records if "error" in r.payload),
            "executions": {k: len(v) for k, v in self.executions.items()},
            "skipped": {k: len(v) for k, v in self.skipped.items()},
            "pending_requests": self.pending,
            "max_window_usage": {
                r: max([n for (c, res, w), n in usage.items() if res == r], default=0) for r in RESOURCES
            },
        }


class _Run:
    def __init__(self, cfg: HarvestConfig, pool: CredentialPool, source, state: HarvestState):
        self.cfg = cfg
        self.pool = pool
        self.source = source
        self.state = state
        self.records: list[SnapshotRecord] = []
        self.dispatches: list[Dispatch] = []
        self.partial: dict[tuple, set] = {}  # id-list pages seen so far per fetch

    def emit(self, ts, task, target, payload):
        self.records.append(SnapshotRecord(len(self.records), ts, task, target, payload))

    def build_units(self, ex: _Execution) -> list:
        targets = SELECTORS[ex.task.selector](self.state)
        budget = self.cfg.budgets[ex.task.resource]
        if ex.task.resource == DETAILS:
            return [_Unit(batch) for batch in plan_requests(targets, budget)]
        return [_Unit((t,), kind) for t in targets for kind in ex.task.lists]

    def attempt(self, ex: _Execution, unit: _Unit, now: int) -> list:
        """Send one request; returns follow-up units (the next page, if any)."""
        task = ex.task
        cred, window = self.pool.acquire(task.resource, now)
        unit.attempts += 1
        try:
            if unit.kind is None:
                rows = self.source.account_details(list(unit.targets))
            else:
                cap = self.cfg.budgets[ID_LIST].payload_cap
                page = self.source.id_page(unit.targets[0], unit.kind, unit.cursor, cap)
        except SourceError as exc:
            self.dispatches.append(Dispatch(now, cred, task.resource, window, task.name, len(unit.targets), False))
            if unit.attempts >= self.cfg.max_attempts:
                payload = {"error": str(exc), "attempts": unit.attempts, "execution": ex.number,
                           "targets": list(unit.targets)}
                if unit.kind is not None:
                    payload.update({"list": unit.kind, "page": unit.page})
                self.emit(now, task.name, unit.targets[0], payload)
                return []
            unit.not_before = now + self.cfg.backoff * 2 ** (unit.attempts - 1)
            return [unit]
        self.dispatches.append(Dispatch(now, cred, task.resource, window, task.name, len(unit.targets), True))
        if unit.kind is None:
            for t in unit.targets:
                row = rows.get(t)
                if row is None:
                    self.emit(now, task.name, t, {"missing": True, "execution": ex.number})
                else:
                    self.state.details[t] = row
                    self.emit(now, task.name, t, {"attributes": row, "execution": ex.number})
            return []
        target = unit.targets[0]
        if page is None:
            self.emit(now, task.name, target, {"missing": True, "list": unit.kind, "execution": ex.number})
            return []
        ids, nxt = page
        self.emit(now, task.name, target, {
            "list": unit.kind, "page": unit.page, "ids": list(ids),
            "final": nxt is None, "execution": ex.number,
        })
        key = (target, unit.kind)
        fetch = (task.name, ex.number) + key
        self.partial.setdefault(fetch, set()).update(ids)
        if nxt is None:
            self.state.lists[key] = frozenset(self.partial.pop(fetch))
            return []
        return [_Unit(unit.targets, unit.kind, nxt, unit.page + 1)]


def run(
    tasks: Sequence[PollTask],
    pool: CredentialPool,
    source,
    clock: SimClock,
    duration: int,
    honeypots: Sequence[NodeId],
    tick: int = 60,
    max_attempts: int = 3,
    backoff: int = 60,
    fanout_cap: int = FANOUT_CAP,
) -> HarvestResult:
    """Simulate ``duration`` seconds of polling starting at ``clock.now``.

    Every tick, due tasks open an execution; open executions then dispatch in
    priority order (shorter period first, then earlier due time) until their
    resource has no budget left on any credential.
    """
    if not tasks:
        raise ValidationError("run needs at least one task")
    if duration < 0:
        raise ValidationError("duration must be >= 0")
    cfg = HarvestConfig(tuple(tasks), pool.budgets, pool.credentials, tick, max_attempts, backoff, fanout_cap)
    for t in tasks:
        if t.resource not in pool.budgets:
            raise ValidationError(f"no budget configured for resource {t.resource!r}")
    state = HarvestState(honeypots, fanout_cap)
    r = _Run(cfg, pool, source, state)
    start = clock.now
    end = start + duration
    next_due = {t.name: start for t in tasks}
    counter = {t.name: 0 for t in tasks}
    executions = {t.name: [] for t in tasks}
    skipped = {t.name: [] for t in tasks}
    open_ex: list[_Execution] = []
    while clock.now < end:
        now = clock.now
        for i, t in enumerate(tasks):
            while next_due[t.name] <= now:
                due = next_due[t.name]
                next_due[t.name] = due + t.period
                if any(e.task.name == t.name for e in open_ex):
                    skipped[t.name].append(due)
                    continue
                open_ex.append(_Execution(t, i, counter[t.name], due))
                counter[t.name] += 1
        open_ex.sort(key=lambda e: (e.task.period, e.due, e.index))
        exhausted: set = set()
        for ex in open_ex:
            if ex.started is None:
                ex.started = now
                executions[ex.task.name].append(now)
            _dispatch(r, ex, now, exhausted)
        open_ex = [e for e in open_ex if e.units]
        clock.advance(tick)
    pending = sum(len(e.units or ()) for e in open_ex)
    return HarvestResult(r.records, r.dispatches, executions, skipped, pending)


def _dispatch(r: _Run, ex: _Execution, now: int, exhausted: set) -> None:
    if ex.units is None:
        ex.units = r.build_units(ex)
    res = ex.task.resource
    waiting = []
    units = ex.units
    while units:
        unit = units.pop(0)
        if res in exhausted or unit.not_before > now:
            waiting.append(unit)
            continue
        if not any(r.pool.remaining(c, res, now) > 0 for c in r.pool.credentials):
            exhausted.add(res)
            waiting.append(unit)
            continue
        follow = r.attempt(ex, unit, now)
        for u in follow:
            if u is unit:
                waiting.append(u)  # retry after backoff
            else:
                units.insert(0, u)  # next page of the same list
    ex.units = waiting


def harvest(
    source,
    honeypots: Sequence[NodeId],
    hours: float,
    config: HarvestConfig | None = None,
    start: int = 0,
) -> HarvestResult:
    cfg = config or HarvestConfig()
    pool = CredentialPool(cfg.credentials, cfg.budgets)
    return run(cfg.tasks, pool, source, SimClock(start), int(round(hours * HOUR)), honeypots,
               cfg.tick, cfg.max_attempts, cfg.backoff, cfg.fanout_cap)
