"""Command-line entry points: inspect the lattice, validate and render
session scripts, serve a live session, and re-broadcast a recording.

Every subcommand is deterministic given its inputs; only ``replay`` paces
itself against the wall clock.  Exit status is 0 on success and nonzero on
any error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import numpy as np

from .engine import Cell, GridConfig, cell_to_coord
from .server import Session, create_app, port_is_free, run_replay_broadcast
from .session import (
    LogParseError,
    load_log,
    replay,
    replay_steps,
    snapshot_to_wire,
)
from .synth import RenderConfig, render_performance, wav_encode
from .tuning import (
    CoordRangeError,
    TuningSystem,
    coord_frequency,
    helmholtz_annotation,
    lattice_ratio,
    ratio_cents,
)


class CliError(Exception):
    """Fatal command error; message goes to stderr, exit status 1."""


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise CliError(f"--grid expects WxH (e.g. 16x16), got '{text}'") from None


def _parse_origin(text: str) -> tuple[int, int]:
    try:
        r, c = text.split(",")
        return int(r), int(c)
    except ValueError:
        raise CliError(f"--origin expects R,C (e.g. 8,8), got '{text}'") from None


def _grid_config(args: argparse.Namespace) -> GridConfig:
    width, height = _parse_grid(args.grid)
    origin_row, origin_col = _parse_origin(args.origin)
    try:
        return GridConfig(
            width=width,
            height=height,
            origin_row=origin_row,
            origin_col=origin_col,
            base_hz=args.base_hz,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _system(args: argparse.Namespace) -> TuningSystem:
    return TuningSystem.FIVE_LIMIT if args.system == "5" else TuningSystem.SEVEN_LIMIT


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid", default="16x16", help="grid size as WxH")
    parser.add_argument("--origin", default="8,8", help="lattice origin cell as R,C")
    parser.add_argument("--base-hz", type=float, default=440.0, help="base pitch in Hz")


def cmd_lattice(args: argparse.Namespace) -> int:
    config = _grid_config(args)
    system = _system(args)
    rows = []
    for row in range(config.height):
        for col in range(config.width):
            coord = cell_to_coord(Cell(row, col), config)
            try:
                ratio = lattice_ratio(coord, system)
            except CoordRangeError:
                rows.append((row, col, coord, None, None, None, None))
                continue
            freq = coord_frequency(coord, system, config.base_hz)
            cents = ratio_cents(ratio)
            ann = helmholtz_annotation(coord, system)
            rows.append((row, col, coord, ratio, freq, cents, ann))

    if args.format == "machine":
        for row, col, coord, ratio, freq, cents, ann in rows:
            record = {
                "row": row,
                "col": col,
                "fifths": coord.fifths,
                "limb": coord.limb,
                "ratio": None if ratio is None else f"{ratio.numerator}/{ratio.denominator}",
                "freq_hz": None if freq is None else round(freq, 6),
                "cents": None if cents is None else round(cents, 3),
                "note": None if ann is None else ann.note_name,
                "comma": None if ann is None else ann.comma_alteration,
                "septimal": None if ann is None else ann.septimal_alteration,
            }
            print(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
        return 0

    print(f"{args.system}-limit lattice, {config.width}x{config.height}, "
          f"origin ({config.origin_row},{config.origin_col}), base {config.base_hz:g} Hz")
    header = f"{'cell':>9}  {'coord':>9}  {'ratio':>12}  {'Hz':>12}  {'cents':>9}  note"
    print(header)
    print("-" * len(header))
    for row, col, coord, ratio, freq, cents, ann in rows:
        cell = f"({row},{col})"
        coord_s = f"({coord.fifths:+d},{coord.limb:+d})"
        if ratio is None:
            print(f"{cell:>9}  {coord_s:>9}  {'out-of-range':>12}")
            continue
        ratio_s = f"{ratio.numerator}/{ratio.denominator}"
        print(
            f"{cell:>9}  {coord_s:>9}  {ratio_s:>12}  {freq:>12.4f}  {cents:>9.3f}  {ann.label()}"
        )
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    config = _grid_config(args)
    try:
        log = load_log(args.script)
    except FileNotFoundError:
        raise CliError(f"no such file: {args.script}") from None
    except LogParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    steps = replay_steps(log, config)
    if args.format == "machine":
        for i, step in enumerate(steps):
            print(
                json.dumps(
                    {
                        "index": i,
                        "at": step.event.at,
                        "kind": step.event.kind,
                        "arg": step.event.arg,
                        "accepted": step.result.accepted,
                        "reason": step.result.reason,
                        "snapshot": snapshot_to_wire(step.snapshot),
                    },
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
            )
        return 0
    rejected = 0
    for i, step in enumerate(steps):
        if step.result.accepted:
            verdict = "ok"
        else:
            rejected += 1
            verdict = f"rejected ({step.result.reason})"
        print(f"#{i + 1} at={step.event.at}ms {step.event.kind} {step.event.arg} -> {verdict}")
    print(f"{len(log)} events, 0 malformed, {rejected} rejected")
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    config = _grid_config(args)
    try:
        log = load_log(args.script)
    except FileNotFoundError:
        raise CliError(f"no such file: {args.script}") from None
    except LogParseError as exc:
        raise CliError(f"parse error: {exc}") from None
    render_config = RenderConfig(sample_rate=args.sample_rate)
    _, effects = replay(log, config)
    samples = render_performance(effects, render_config)
    encoded = wav_encode(samples, render_config)
    with open(args.output, "wb") as fh:
        fh.write(encoded.data)
    duration = len(samples) / render_config.sample_rate
    peak = float(np.max(np.abs(samples))) if len(samples) else 0.0
    peak_db = 20.0 * np.log10(peak) if peak > 0 else float("-inf")
    print(
        f"wrote {args.output}: {duration:.3f} s, peak {peak_db:.2f} dBFS, "
        f"{encoded.clip_count} clipped"
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    config = _grid_config(args)
    if not port_is_free(args.port, args.host):
        raise CliError(f"port {args.port} is already in use")
    if args.ui is not None and not (Path(args.ui) / "index.html").is_file():
        raise CliError(f"--ui directory has no index.html: {args.ui}")
    app = create_app(config, log_path=args.log, ui_dir=args.ui)
    print(f"serving on ws://{args.host}:{args.port}/ws/performer (log: {args.log})")
    if args.ui is not None:
        print(f"performer UI at http://{args.host}:{args.port}/")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    import uvicorn

    config = _grid_config(args)
    try:
        log = load_log(args.script)
    except FileNotFoundError:
        raise CliError(f"no such file: {args.script}") from None
    except LogParseError as exc:
        raise CliError(f"parse error: {exc}") from None
    if args.speed <= 0:
        raise CliError(f"--speed must be positive, got {args.speed}")
    if not port_is_free(args.port, args.host):
        raise CliError(f"port {args.port} is already in use")

    app = create_app(config, accept_performer=False)
    session: Session = app.state.session

    async def _run() -> None:
        server = uvicorn.Server(
            uvicorn.Config(app, host=args.host, port=args.port, log_level="warning")
        )
        task = asyncio.create_task(server.serve())
        await asyncio.sleep(0.2)  # let the server come up
        print(f"re-broadcasting {len(log)} events at {args.speed:g}x on port {args.port}")
        await run_replay_broadcast(session, log, args.speed)
        print("replay complete; observers stay connected (Ctrl-C to stop)")
        await task

    try:
        asyncio.run(_run())
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jigrid",
        description="grid-based just-intonation instrument tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    lattice = sub.add_parser("lattice", help="print the tuning table for every grid cell")
    _add_grid_flags(lattice)
    lattice.add_argument("--system", choices=("5", "7"), default="5")
    lattice.add_argument("--format", choices=("text", "machine"), default="text")
    lattice.set_defaults(func=cmd_lattice)

    validate = sub.add_parser("validate", help="replay a script and report each event")
    validate.add_argument("script", help="path to a .limlog script")
    _add_grid_flags(validate)
    validate.add_argument("--format", choices=("text", "machine"), default="text")
    validate.set_defaults(func=cmd_validate)

    render = sub.add_parser("render", help="render a script to a WAV file")
    render.add_argument("script", help="path to a .limlog script")
    render.add_argument("-o", "--output", required=True, help="output .wav path")
    _add_grid_flags(render)
    render.add_argument("--sample-rate", type=int, default=44100)
    render.set_defaults(func=cmd_render)

    serve = sub.add_parser("serve", help="run a live session server")
    _add_grid_flags(serve)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--log", default="session.limlog", help="session log path")
    serve.add_argument("--ui", default=None, help="static dir with the performer UI to host at /")
    serve.set_defaults(func=cmd_serve)

    rep = sub.add_parser("replay", help="re-broadcast a recorded session to observers")
    rep.add_argument("script", help="path to a .limlog recording")
    _add_grid_flags(rep)
    rep.add_argument("--host", default="127.0.0.1")
    rep.add_argument("--port", type=int, default=8765)
    rep.add_argument("--speed", type=float, default=1.0, help="tempo multiplier")
    rep.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
