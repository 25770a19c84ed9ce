"""Command-line entry point: validate, run, simulate, materials, serve.

Exit codes: 0 success, 1 domain error (invalid config, illegal action,
wrong game kind), 2 environment error (unreadable file, occupied port).
"""

from __future__ import annotations

import json
import socket
from dataclasses import replace
from pathlib import Path
from typing import Any

import click

from .errors import EngineError
from .exact import format_exact
from .games import module_for, surprise_box
from .model import MAX_SEED, DisplayMode, GameKind, LessonConfig, Outcome
from .rng import mix64
from .session import (
    apply_event,
    canonical_json,
    create_session,
    export_log_lines,
    parse_lesson,
    session_snapshot,
)

EXIT_DOMAIN = 1
EXIT_ENV = 2


@click.group()
@click.option("--seed", type=click.IntRange(0, MAX_SEED), default=None, help="Override the lesson seed.")
@click.option("--quiet", is_flag=True, help="Suppress informational output.")
@click.pass_context
def main(ctx: click.Context, seed: int | None, quiet: bool) -> None:
    """Plan, validate, script, simulate and serve classroom AI game lessons."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["quiet"] = quiet


def _say(ctx: click.Context, message: str) -> None:
    if not ctx.obj.get("quiet"):
        click.echo(message)


def _fail(ctx: click.Context, code: int, message: str) -> None:
    click.echo(message, err=True)
    ctx.exit(code)


def _read_text(ctx: click.Context, path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        _fail(ctx, EXIT_ENV, f"error [io-error]: cannot read {path}: {exc}")
        raise AssertionError("unreachable")


def _read_json(ctx: click.Context, path: Path) -> Any:
    text = _read_text(ctx, path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        _fail(ctx, EXIT_DOMAIN, f"error [invalid-config]: {path} is not valid JSON: {exc}")


def _load_config(ctx: click.Context, path: Path) -> LessonConfig:
    doc = _read_json(ctx, path)
    config, report = parse_lesson(doc)
    if config is None:
        for line in report.lines():
            click.echo(line, err=True)
        ctx.exit(EXIT_DOMAIN)
        raise AssertionError("unreachable")
    seed_override = ctx.obj.get("seed")
    if seed_override is not None:
        config = replace(config, seed=seed_override)
    return config


@main.command()
@click.argument("config_path", type=click.Path(path_type=Path))
@click.pass_context
def validate(ctx: click.Context, config_path: Path) -> None:
    """Check that a lesson config file is playable."""
    doc = _read_json(ctx, config_path)
    config, report = parse_lesson(doc)
    for line in report.lines():
        _say(ctx, line)
    if config is None:
        ctx.exit(EXIT_DOMAIN)
    _say(ctx, f"ok: {config_path} is a playable {config.game.value} lesson")


def _outcome_lines(seq: int, actor: str, outcome: Outcome) -> list[str]:
    data = dict(outcome.data)
    if outcome.kind == "status":
        return [f"[{seq}] {actor} status -> {data['status']}"]
    lines = [f"[{seq}] {actor} {outcome.kind}"]
    if outcome.kind == "activation":
        lines += [f"  {entry}" for entry in data["trace"]]
        lines.append(f"  decision: {data['decision']}")
    elif outcome.kind == "reweigh":
        if data.get("found"):
            rendered = ", ".join(f"{pair}={w}" for pair, w in data["assignment"].items())
            lines.append(f"  assignment: {rendered}")
            lines.append(f"  decision: {data['decision']}")
        else:
            lines.append("  no satisfying assignment")
    else:
        lines.append(f"  {canonical_json(data)}")
    return lines


def _parse_script(ctx: click.Context, text: str) -> list[tuple[str, dict[str, Any]]]:
    records: list[tuple[str, dict[str, Any]]] = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            _fail(ctx, EXIT_DOMAIN, f"error [invalid-script]: line {number}: {exc}")
        if (
            not isinstance(doc, dict)
            or not isinstance(doc.get("actor"), str)
            or not isinstance(doc.get("action"), dict)
        ):
            _fail(ctx, EXIT_DOMAIN, f"error [invalid-script]: line {number}: expected {{actor, action}}")
        records.append((doc["actor"], doc["action"]))
    return records


@main.command()
@click.argument("config_path", type=click.Path(path_type=Path))
@click.argument("script_path", type=click.Path(path_type=Path))
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Write the session log as JSON Lines.")
@click.pass_context
def run(ctx: click.Context, config_path: Path, script_path: Path, out_path: Path | None) -> None:
    """Play a scripted lesson headlessly, printing every outcome."""
    config = _load_config(ctx, config_path)
    records = _parse_script(ctx, _read_text(ctx, script_path))
    session = create_session(config, session_id="cli-run")
    for actor, action in records:
        try:
            session, outcome = apply_event(session, actor, action)
        except EngineError as exc:
            _fail(ctx, EXIT_DOMAIN, f"error at seq {session.next_seq}: [{exc.code}] {exc}")
        for line in _outcome_lines(session.log[-1].seq, actor, outcome):
            _say(ctx, line)
    if out_path is not None:
        out_path.write_text("\n".join(export_log_lines(session)) + "\n", encoding="utf-8")
        _say(ctx, f"log written to {out_path}")
    _say(ctx, "final state:")
    _say(ctx, canonical_json(session_snapshot(session, DisplayMode.TEACHER)))


@main.command()
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--rounds", type=click.IntRange(0), default=10_000, show_default=True,
              help="Seeded rounds per card.")
@click.option("--report-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Also write the TSV plus a comparison figure here.")
@click.pass_context
def simulate(ctx: click.Context, config_path: Path, rounds: int, report_dir: Path | None) -> None:
    """Monte-Carlo check of the card table (TSV: analytic EV/VOI vs empirical mean)."""
    config = _load_config(ctx, config_path)
    if config.game is not GameKind.SURPRISE_BOX:
        _fail(ctx, EXIT_DOMAIN, "error [wrong-game-kind]: simulate requires a surprise_box lesson")
    payload = config.payload
    lines = ["card\tposterior_best_box\tev\tvoi\tempirical_mean"]
    rows: list[dict[str, Any]] = []
    if rounds > 0:
        for index, row in enumerate(surprise_box.analytics_rows(payload)):
            card = payload.all_cards[index]
            mean, _stderr = surprise_box.simulate_card(
                card, payload.prizes, rounds, mix64(config.seed, index)
            )
            rows.append({**row, "empirical_mean": mean})
            lines.append(
                f"{row['card']}\t{row['best_box']}\t{format_exact(row['ev'])}"
                f"\t{format_exact(row['voi'])}\t{mean:.4f}"
            )
    table = "\n".join(lines)
    click.echo(table)
    if report_dir is not None:
        from . import report

        report_dir.mkdir(parents=True, exist_ok=True)
        (report_dir / "simulation.tsv").write_text(table + "\n", encoding="utf-8")
        figure = report.simulation_figure(rows, report_dir / "ev_comparison.png") if rows else None
        _say(ctx, f"report written to {report_dir / 'simulation.tsv'}")
        if figure is not None:
            _say(ctx, f"figure written to {figure}")


@main.command()
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--report-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Also write the manifest plus a printable figure here.")
@click.pass_context
def materials(ctx: click.Context, config_path: Path, report_dir: Path | None) -> None:
    """Print the physical kit manifest for a lesson."""
    config = _load_config(ctx, config_path)
    lines = [f"materials for lesson '{config.game.value}':"]
    lines += module_for(config.game).materials_lines(config)
    manifest = "\n".join(lines)
    click.echo(manifest)
    if report_dir is not None:
        from . import report

        report_dir.mkdir(parents=True, exist_ok=True)
        (report_dir / "materials.txt").write_text(manifest + "\n", encoding="utf-8")
        figure = report.materials_figure(config, report_dir / "materials.png")
        _say(ctx, f"report written to {report_dir / 'materials.txt'}")
        _say(ctx, f"figure written to {figure}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--state-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Persist session logs here (write-ahead JSONL).")
@click.option("--resume", "resume_dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Restore sessions from this log directory, then keep writing to it.")
@click.pass_context
def serve(ctx: click.Context, host: str, port: int, state_dir: Path | None, resume_dir: Path | None) -> None:
    """Serve the HTTP session API until interrupted."""
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        probe.close()
        _fail(ctx, EXIT_ENV, f"error [bind-failure]: cannot bind {host}:{port}: {exc}")
    probe.close()

    import uvicorn

    from .server import build_app

    directory = resume_dir if resume_dir is not None else state_dir
    app = build_app(state_dir=directory, resume=resume_dir is not None)
    _say(ctx, f"serving on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning" if ctx.obj.get("quiet") else "info")


if __name__ == "__main__":
    main()
