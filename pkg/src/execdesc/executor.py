"""Parameter binding and plan execution through the POSIX shell.

Each step runs as its own ``sh -c`` invocation in the configured working
directory; no shell state carries between steps.  A step starts only after
every dependency succeeded.  On failure the transitive dependents are
skipped, attributed to the failed ancestor; without keep_going the rest of
the plan is abandoned too, attributed to the first failure.  Steps already
running are always allowed to finish.
"""

from __future__ import annotations

import heapq
import logging
import os
import re
import subprocess
import time
import uuid
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional

from execdesc.description import CommandTemplate, ParameterSpec
from execdesc.errors import ExecdescError
from execdesc.planner import Plan
from execdesc.rdf import Iri

logger = logging.getLogger(__name__)

_PLACEHOLDER = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")

SPAWN_FAILURE_EXIT = 127


class BindingError(ExecdescError):
    """A command template cannot be bound with the given parameter values."""


class ExecutorError(ExecdescError):
    """The run could not start (bad working directory, unwritable logs)."""


def bind_parameters(
    template: CommandTemplate,
    bindings: Mapping[str, str],
    specs: Iterable[ParameterSpec] = (),
    strict: bool = False,
) -> str:
    """Fill every ``${name}`` and enforce declared parameter bounds.

    The result never contains ``${``: values may not smuggle new placeholders
    in, and a template whose ``${`` does not form a well-formed placeholder
    is rejected.  Bindings for names the template never mentions are logged,
    or rejected when ``strict`` is set.
    """
    by_name = {spec.name: spec for spec in specs}
    names = template.placeholders

    missing = sorted(set(names) - set(bindings))
    if missing:
        raise BindingError(
            "missing value for placeholder: " + ", ".join(f"${{{n}}}" for n in missing)
        )
    extra = sorted(set(bindings) - set(names))
    if extra:
        message = "unused parameter bindings: " + ", ".join(extra)
        if strict:
            raise BindingError(message)
        logger.warning(message)

    for name in names:
        value = bindings[name]
        if "${" in value:
            raise BindingError(
                f"value for {name!r} contains '${{', which would reintroduce a placeholder"
            )
        spec = by_name.get(name)
        if spec is None:
            continue
        if spec.kind == "numeric-range":
            try:
                number = float(value)
            except ValueError:
                raise BindingError(
                    f"parameter {name!r} must be numeric, got {value!r}"
                ) from None
            if spec.minimum is not None and number < spec.minimum:
                raise BindingError(
                    f"parameter {name!r} value {value} is below the minimum {spec.minimum:g}"
                )
            if spec.maximum is not None and number > spec.maximum:
                raise BindingError(
                    f"parameter {name!r} value {value} is above the maximum {spec.maximum:g}"
                )
        elif spec.kind == "enumeration":
            if value not in spec.allowed:
                raise BindingError(
                    f"parameter {name!r} value {value!r} is not one of: "
                    + ", ".join(spec.allowed)
                )

    bound = _PLACEHOLDER.sub(lambda m: bindings[m.group(1)], template.raw)
    if "${" in bound:
        at = bound.index("${")
        raise BindingError(
            f"malformed placeholder syntax at position {at}: {bound[at:at + 20]!r}"
        )
    return bound


@dataclass(frozen=True)
class RunOptions:
    working_dir: Path
    log_dir: Optional[Path] = None
    dry_run: bool = False
    keep_going: bool = False
    environment: Mapping[str, str] = field(default_factory=dict)
    max_parallel: int = 1

    def __post_init__(self):
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be at least 1")
        object.__setattr__(self, "working_dir", Path(self.working_dir))
        if self.log_dir is not None:
            object.__setattr__(self, "log_dir", Path(self.log_dir))


@dataclass(frozen=True)
class StepResult:
    process: Iri
    bound_command: str
    status: str  # succeeded | failed | skipped | planned
    exit_code: Optional[int] = None
    blocked_by: Optional[Iri] = None
    wall_time: float = 0.0
    started_at: Optional[float] = None
    finished_at: Optional[float] = None
    stdout_path: Optional[Path] = None
    stderr_path: Optional[Path] = None


@dataclass(frozen=True)
class ExecutionReport:
    steps: tuple[StepResult, ...]
    overall: str  # success | failure | dry_run

    def to_records(self) -> list[dict]:
        """One plain dict per step, in plan order, for machine consumption."""
        records = []
        for s in self.steps:
            records.append(
                {
                    "process": str(s.process),
                    "command": s.bound_command,
                    "status": s.status,
                    "exit_code": s.exit_code,
                    "duration_ms": round(s.wall_time * 1000),
                    "blocked_by": str(s.blocked_by) if s.blocked_by else None,
                    "stdout": str(s.stdout_path) if s.stdout_path else None,
                    "stderr": str(s.stderr_path) if s.stderr_path else None,
                }
            )
        return records

    def summary_lines(self) -> list[str]:
        lines = []
        for s in self.steps:
            if s.status == "succeeded":
                detail = f"ok in {s.wall_time:.2f}s"
            elif s.status == "failed":
                detail = f"exit {s.exit_code} after {s.wall_time:.2f}s"
            elif s.status == "skipped":
                detail = f"skipped, blocked by <{s.blocked_by}>"
            else:
                detail = "planned (dry run)"
            lines.append(f"{s.status:9s} <{s.process}> {s.bound_command!r} {detail}")
        lines.append(f"overall: {self.overall}")
        return lines


def _slug(iri: Iri, taken: set[str]) -> str:
    tail = str(iri)
    for sep in ("#", "/"):
        if sep in tail:
            tail = tail.rsplit(sep, 1)[1] or tail
    slug = re.sub(r"[^A-Za-z0-9._-]", "-", tail) or "step"
    candidate, counter = slug, 1
    while candidate in taken:
        counter += 1
        candidate = f"{slug}-{counter}"
    taken.add(candidate)
    return candidate


def _probe_log_dir(log_dir: Path):
    try:
        log_dir.mkdir(parents=True, exist_ok=True)
        probe = log_dir / f".write-probe-{uuid.uuid4().hex}"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise ExecutorError(f"log directory {log_dir} is not writable: {exc}") from exc


def execute_plan(plan: Plan, opts: RunOptions) -> ExecutionReport:
    """Run every step of ``plan`` per the options; never raises on step failure."""
    if opts.dry_run:
        steps = tuple(
            StepResult(s.process, s.bound_command, "planned") for s in plan.steps
        )
        return ExecutionReport(steps=steps, overall="dry_run")

    if not opts.working_dir.is_dir():
        raise ExecutorError(f"working directory {opts.working_dir} does not exist")
    log_dir = opts.log_dir if opts.log_dir is not None else opts.working_dir / ".execdesc-logs"
    _probe_log_dir(log_dir)

    environment = dict(os.environ)
    environment.update(opts.environment)

    taken: set[str] = set()
    slugs = {s.process: _slug(s.process, taken) for s in plan.steps}
    by_iri = {s.process: s for s in plan.steps}
    dependents: dict[Iri, list[Iri]] = {s.process: [] for s in plan.steps}
    pending = {s.process: len(s.depends_on) for s in plan.steps}
    for s in plan.steps:
        for dep in s.depends_on:
            dependents[dep].append(s.process)

    results: dict[Iri, StepResult] = {}
    ready = [iri for iri, count in pending.items() if count == 0]
    heapq.heapify(ready)
    abandoning: Optional[Iri] = None  # set to the first failure unless keep_going

    def run_step(iri: Iri) -> StepResult:
        step = by_iri[iri]
        out_path = log_dir / f"{slugs[iri]}.out"
        err_path = log_dir / f"{slugs[iri]}.err"
        started = time.monotonic()
        try:
            with open(out_path, "wb") as out, open(err_path, "wb") as err:
                proc = subprocess.run(
                    ["sh", "-c", step.bound_command],
                    cwd=opts.working_dir,
                    env=environment,
                    stdout=out,
                    stderr=err,
                )
            exit_code = proc.returncode
        except OSError as exc:
            # The shell itself could not be spawned; record it like a
            # command-not-found so the report shape stays uniform.
            with open(err_path, "ab") as err:
                err.write(f"spawn failure: {exc}\n".encode())
            exit_code = SPAWN_FAILURE_EXIT
        finished = time.monotonic()
        return StepResult(
            process=iri,
            bound_command=step.bound_command,
            status="succeeded" if exit_code == 0 else "failed",
            exit_code=exit_code,
            wall_time=finished - started,
            started_at=started,
            finished_at=finished,
            stdout_path=out_path,
            stderr_path=err_path,
        )

    def skip(iri: Iri, blocker: Iri):
        step = by_iri[iri]
        results[iri] = StepResult(
            process=iri,
            bound_command=step.bound_command,
            status="skipped",
            blocked_by=blocker,
        )

    def propagate_skip(root: Iri):
        # Transitive dependents inherit the failed ancestor as the blocker;
        # the smallest failed root wins when several could claim a step.
        frontier = list(dependents[root])
        while frontier:
            iri = frontier.pop()
            current = results.get(iri)
            if current is not None and current.status != "skipped":
                continue
            if current is not None and str(current.blocked_by) <= str(root):
                continue
            skip(iri, root)
            frontier.extend(dependents[iri])

    with ThreadPoolExecutor(max_workers=opts.max_parallel) as pool:
        running = {}
        while True:
            while ready and len(running) < opts.max_parallel and abandoning is None:
                iri = heapq.heappop(ready)
                if iri in results:  # already skipped by a failed dependency
                    continue
                running[pool.submit(run_step, iri)] = iri
            if not running:
                break
            done, _ = wait(running, return_when=FIRST_COMPLETED)
            for future in done:
                iri = running.pop(future)
                result = future.result()
                results[iri] = result
                if result.status == "succeeded":
                    for dependent in dependents[iri]:
                        pending[dependent] -= 1
                        if pending[dependent] == 0 and dependent not in results:
                            heapq.heappush(ready, dependent)
                else:
                    propagate_skip(iri)
                    if not opts.keep_going and abandoning is None:
                        abandoning = iri

    for step in plan.steps:
        if step.process not in results:
            # Fail-fast abandonment: unrelated steps never started.
            skip(step.process, abandoning)

    ordered = tuple(results[s.process] for s in plan.steps)
    overall = "success" if all(r.status == "succeeded" for r in ordered) else "failure"
    return ExecutionReport(steps=ordered, overall=overall)
