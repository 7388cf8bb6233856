"""Analysis server: one WebSocket session per UI connection.

Each connection owns a Session and processes its commands strictly in
order on a worker task, off the receive loop, so progress frames and new
commands keep flowing while an embedding job runs.  A newer request of the
same kind supersedes an older unfinished one, which is cancelled
cooperatively and answered with a ``superseded`` error.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import ValidationError

from triview.baselines import compare_baselines
from triview.dataio import dataset_summary, load_dataset
from triview.errors import InputValidationError, JobCancelled, NumericalError
from triview.protocol import (
    ClientMessage,
    ConfigPayload,
    error_frame,
    parse_client_message,
    progress_frame,
    result_frame,
)
from triview.session import PipelineConfig, Session
from triview.stage1 import ModeCombo
from triview.stage2 import NeighborParams
from triview.tensor import Mode


def config_from_payload(cp: ConfigPayload) -> PipelineConfig:
    return PipelineConfig(
        method1=cp.method1,
        method2=cp.method2,
        neighbor=NeighborParams(
            n_neighbors=cp.neighbors,
            min_dist=cp.min_dist,
            epochs=cp.epochs,
            seed=cp.seed,
        ),
        standardize=cp.standardize,
        bins=cp.bins,
    )


class ConnectionState:
    """Per-connection mutable state; touched only by the worker thread."""

    def __init__(self, dataset_root: Path):
        self.dataset_root = dataset_root
        self.session: Session | None = None

    def require_session(self) -> Session:
        if self.session is None:
            raise InputValidationError("no dataset loaded; send load_dataset first")
        return self.session


def _contributions_doc(session: Session) -> dict:
    return {
        "clusters": [c.to_doc() for c in session.clusters],
        "contributions": [
            {"cluster_id": cid, "combo": combo_key, "fc": fc.to_doc()}
            for cid, per_combo in sorted(session.contributions.items())
            for combo_key, fc in sorted(per_combo.items())
        ],
    }


def handle_message(
    state: ConnectionState, msg: ClientMessage, progress
) -> tuple[str, dict]:
    """Execute one command; returns (answers, result body).  Blocking."""
    kind = msg.kind
    if kind == "load_dataset":
        target = (state.dataset_root / msg.payload.path).resolve()
        root = state.dataset_root.resolve()
        if root not in (target, *target.parents):
            raise InputValidationError("dataset path escapes the dataset root")
        tensor = load_dataset(target)
        state.session = Session(tensor)
        return kind, dataset_summary(tensor)

    session = state.require_session()
    if kind == "request_results":
        if msg.payload.config is not None:
            session.set_config(config_from_payload(msg.payload.config))
        session.set_point_mode(Mode.from_name(msg.payload.point_mode))
        results = session.results(progress=progress)
        return kind, {
            "point_mode": msg.payload.point_mode,
            "results": [r.to_doc() for r in results],
        }
    if kind == "select_cluster":
        selection = session.select_cluster(msg.payload.point_ids, msg.payload.label)
        return kind, {
            "cluster": selection.to_doc(),
            **_contributions_doc(session),
        }
    if kind == "remove_cluster":
        session.remove_cluster(msg.payload.cluster_id)
        return kind, {
            "removed": msg.payload.cluster_id,
            **_contributions_doc(session),
        }
    if kind == "request_histograms":
        combo = None
        if (msg.payload.first is None) != (msg.payload.second is None):
            raise InputValidationError(
                "histogram combo needs both first and second"
            )
        if msg.payload.first and msg.payload.second:
            combo = ModeCombo(
                Mode.from_name(msg.payload.first),
                Mode.from_name(msg.payload.second),
            )
        hs = session.histograms(
            msg.payload.feature_index, combo=combo, bins=msg.payload.bins
        )
        return kind, hs.to_doc()
    if kind == "request_baselines":
        mode = (
            Mode.from_name(msg.payload.point_mode)
            if msg.payload.point_mode
            else session.point_mode
        )
        report = compare_baselines(
            session.tensor,
            mode,
            config=session.config,
            labels=msg.payload.labels,
            seed=session.config.neighbor.seed,
        )
        return kind, report.to_doc()
    raise InputValidationError(f"unhandled message kind {kind!r}")


def _request_id_of(text: str) -> str:
    try:
        doc = json.loads(text)
    except ValueError:
        return ""
    if isinstance(doc, dict):
        rid = doc.get("request_id", "")
        return rid if isinstance(rid, str) else ""
    return ""


def _validation_summary(exc: ValidationError) -> str:
    first = exc.errors()[0]
    where = ".".join(str(p) for p in first["loc"])
    return f"malformed message: {first['msg']} at {where}"


def create_app(dataset_root: str | Path, static_dir: str | Path | None = None) -> FastAPI:
    root = Path(dataset_root)
    app = FastAPI(title="triview analysis server")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        loop = asyncio.get_running_loop()
        state = ConnectionState(root)
        outbox: asyncio.Queue = asyncio.Queue()
        commands: asyncio.Queue = asyncio.Queue()
        latest: dict[str, str] = {}

        async def writer() -> None:
            while True:
                frame = await outbox.get()
                if frame is None:
                    return
                await websocket.send_text(frame)

        async def worker() -> None:
            while True:
                msg = await commands.get()
                if msg is None:
                    return
                if latest.get(msg.kind) != msg.request_id:
                    outbox.put_nowait(
                        error_frame(
                            msg.request_id,
                            "superseded by a newer request of the same kind",
                            code="superseded",
                        )
                    )
                    continue

                def report(fraction: float, rid=msg.request_id, kind=msg.kind):
                    if latest.get(kind) != rid:
                        return False
                    loop.call_soon_threadsafe(
                        outbox.put_nowait, progress_frame(rid, fraction)
                    )
                    return True

                try:
                    answers, body = await asyncio.to_thread(
                        handle_message, state, msg, report
                    )
                    outbox.put_nowait(result_frame(msg.request_id, answers, body))
                except JobCancelled:
                    outbox.put_nowait(
                        error_frame(
                            msg.request_id,
                            "superseded by a newer request of the same kind",
                            code="superseded",
                        )
                    )
                except InputValidationError as exc:
                    outbox.put_nowait(error_frame(msg.request_id, str(exc)))
                except NumericalError as exc:
                    outbox.put_nowait(
                        error_frame(msg.request_id, str(exc), code="numerical")
                    )
                except FileNotFoundError as exc:
                    outbox.put_nowait(error_frame(msg.request_id, str(exc)))

        writer_task = asyncio.create_task(writer())
        worker_task = asyncio.create_task(worker())
        try:
            while True:
                text = await websocket.receive_text()
                try:
                    msg = parse_client_message(text)
                except ValidationError as exc:
                    outbox.put_nowait(
                        error_frame(_request_id_of(text), _validation_summary(exc))
                    )
                    continue
                latest[msg.kind] = msg.request_id
                commands.put_nowait(msg)
        except WebSocketDisconnect:
            pass
        finally:
            commands.put_nowait(None)
            await worker_task
            outbox.put_nowait(None)
            await writer_task

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
