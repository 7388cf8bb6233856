"""Wire protocol between the analysis server and its UI clients.

Messages are JSON documents, one per WebSocket text frame, each carrying a
``kind`` tag, the client-chosen ``request_id`` and a kind-specific payload.
Every server reply repeats the request_id it answers; ``progress`` frames
report a monotone fraction in [0, 1] for long jobs.
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

PROTOCOL_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConfigPayload(_Strict):
    """Pipeline knobs a client may override per request."""

    method1: Literal["pca", "mean"] = "pca"
    method2: Literal["linear", "neighbor"] = "neighbor"
    neighbors: int = Field(default=15, ge=2)
    min_dist: float = Field(default=0.1, gt=0.0)
    epochs: int = Field(default=500, ge=1)
    seed: int = Field(default=0, ge=0)
    standardize: bool = True
    bins: int = Field(default=20, ge=1)


class LoadDatasetPayload(_Strict):
    path: str


class RequestResultsPayload(_Strict):
    point_mode: Literal["time", "instance", "variable"] = "instance"
    config: ConfigPayload | None = None


class SelectClusterPayload(_Strict):
    point_ids: list[int]
    label: str = ""


class RemoveClusterPayload(_Strict):
    cluster_id: int


class RequestHistogramsPayload(_Strict):
    feature_index: int
    first: Literal["time", "instance", "variable"] | None = None
    second: Literal["time", "instance", "variable"] | None = None
    bins: int | None = None


class RequestBaselinesPayload(_Strict):
    point_mode: Literal["time", "instance", "variable"] | None = None
    labels: list[str] | None = None


class LoadDataset(_Strict):
    kind: Literal["load_dataset"]
    request_id: str
    payload: LoadDatasetPayload


class RequestResults(_Strict):
    kind: Literal["request_results"]
    request_id: str
    payload: RequestResultsPayload


class SelectCluster(_Strict):
    kind: Literal["select_cluster"]
    request_id: str
    payload: SelectClusterPayload


class RemoveCluster(_Strict):
    kind: Literal["remove_cluster"]
    request_id: str
    payload: RemoveClusterPayload


class RequestHistograms(_Strict):
    kind: Literal["request_histograms"]
    request_id: str
    payload: RequestHistogramsPayload


class RequestBaselines(_Strict):
    kind: Literal["request_baselines"]
    request_id: str
    payload: RequestBaselinesPayload


ClientMessage = Annotated[
    Union[
        LoadDataset,
        RequestResults,
        SelectCluster,
        RemoveCluster,
        RequestHistograms,
        RequestBaselines,
    ],
    Field(discriminator="kind"),
]

_client_adapter: TypeAdapter = TypeAdapter(ClientMessage)


class ProgressPayload(_Strict):
    fraction: float = Field(ge=0.0, le=1.0)


class ResultPayload(_Strict):
    # Which request kind this result answers, plus its kind-specific body.
    answers: str
    body: dict


class ErrorPayload(_Strict):
    message: str
    code: str = "invalid_request"


class Progress(_Strict):
    kind: Literal["progress"]
    request_id: str
    payload: ProgressPayload


class Result(_Strict):
    kind: Literal["result"]
    request_id: str
    payload: ResultPayload


class Error(_Strict):
    kind: Literal["error"]
    request_id: str
    payload: ErrorPayload


ServerMessage = Annotated[
    Union[Progress, Result, Error], Field(discriminator="kind")
]

_server_adapter: TypeAdapter = TypeAdapter(ServerMessage)


def parse_client_message(text: str) -> ClientMessage:
    """Validate one inbound frame; raises pydantic.ValidationError."""
    return _client_adapter.validate_json(text)


def parse_server_message(text: str) -> ServerMessage:
    return _server_adapter.validate_json(text)


def progress_frame(request_id: str, fraction: float) -> str:
    msg = Progress(
        kind="progress",
        request_id=request_id,
        payload=ProgressPayload(fraction=fraction),
    )
    return msg.model_dump_json()


def result_frame(request_id: str, answers: str, body: dict) -> str:
    msg = Result(
        kind="result",
        request_id=request_id,
        payload=ResultPayload(answers=answers, body=body),
    )
    return msg.model_dump_json()


def error_frame(request_id: str, message: str, code: str = "invalid_request") -> str:
    msg = Error(
        kind="error",
        request_id=request_id,
        payload=ErrorPayload(message=message, code=code),
    )
    return msg.model_dump_json()
