"""HTTP/JSON projection service for the scenario-explorer UI.

Read-only and pure-compute: the model is loaded once and held as an
immutable snapshot, every request is served from it, and nothing mutates
between requests. Non-2xx responses use a uniform envelope:
``{"error": {"code": ..., "message": ...}}``. Malformed request bodies get
400; structurally valid requests that violate domain rules (unknown states,
row overrides summing past 1) get 422.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .domain import StateVector, TransitionModel
from .forecast import MAX_HORIZON, ScenarioError, apply_scenario, compare, deltas_to_dicts, project, projection_to_dict, scenario_from_dict
from .io import model_to_dict


class _ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _bad_request(message: str) -> _ApiError:
    return _ApiError(400, "bad_request", message)


def _unprocessable(message: str, code: str = "invalid_scenario") -> _ApiError:
    return _ApiError(422, code, message)


def create_app(
    model: TransitionModel,
    *,
    default_initial: StateVector | None = None,
    default_horizon: int = 8,
    assets_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service around one immutable model snapshot."""
    app = FastAPI(title="cohortflow", docs_url=None, redoc_url=None, openapi_url=None)
    space = model.space

    @app.exception_handler(_ApiError)
    async def _api_error_handler(_request: Request, exc: _ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.get("/healthz", response_class=PlainTextResponse)
    async def healthz() -> str:
        return "ok"

    @app.get("/api/model")
    async def get_model() -> JSONResponse:
        return JSONResponse(model_to_dict(model))

    @app.get("/api/states")
    async def get_states() -> JSONResponse:
        return JSONResponse(
            {
                "states": list(space.states),
                "enrolled": list(space.enrolled),
                "absorbing": list(space.absorbing),
                "default_initial": default_initial.as_dict() if default_initial else None,
                "default_horizon": default_horizon,
            }
        )

    def _parse_initial(raw: object) -> StateVector:
        if raw == "from_model_data":
            if default_initial is None:
                raise _unprocessable(
                    "no default initial vector: start the service with --data or --initial",
                    code="no_default_initial",
                )
            return default_initial
        if not isinstance(raw, dict):
            raise _bad_request("initial must be an object of {state: count} or 'from_model_data'")
        counts: dict[str, float] = {}
        for state, value in raw.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise _bad_request(f"initial count for '{state}' must be a number")
            counts[str(state)] = float(value)
        try:
            return StateVector.from_mapping(space, counts)
        except ValueError as exc:
            raise _unprocessable(str(exc), code="invalid_initial") from None

    @app.post("/api/project")
    async def post_project(request: Request) -> JSONResponse:
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise _bad_request(f"request body is not valid JSON: {exc}") from None
        if not isinstance(body, dict):
            raise _bad_request("request body must be a JSON object")
        unknown = set(body) - {"initial", "horizon", "scenario"}
        if unknown:
            raise _bad_request(f"unknown request field {sorted(unknown)[0]!r}")
        if "initial" not in body:
            raise _bad_request("missing field 'initial'")
        if "horizon" not in body:
            raise _bad_request("missing field 'horizon'")

        horizon = body["horizon"]
        if not isinstance(horizon, int) or isinstance(horizon, bool):
            raise _bad_request("horizon must be an integer")
        if not 1 <= horizon <= MAX_HORIZON:
            raise _unprocessable(
                f"horizon must be between 1 and {MAX_HORIZON}, got {horizon}", code="invalid_horizon"
            )

        v0 = _parse_initial(body["initial"])

        scenario_doc = body.get("scenario")
        spec = None
        if scenario_doc is not None:
            try:
                spec = scenario_from_dict(scenario_doc)
            except ScenarioError as exc:
                raise _unprocessable(str(exc)) from None
            except ValueError as exc:
                raise _bad_request(str(exc)) from None

        baseline = project(v0, model, horizon)
        scenario_projection = None
        deltas = None
        if spec is not None:
            try:
                edited = apply_scenario(model, spec)
            except ScenarioError as exc:
                raise _unprocessable(str(exc)) from None
            scenario_projection = project(v0, edited, horizon)
            deltas = compare(baseline, scenario_projection)

        return JSONResponse(
            {
                "baseline": projection_to_dict(baseline),
                "scenario": projection_to_dict(scenario_projection) if scenario_projection else None,
                "deltas": deltas_to_dicts(deltas) if deltas is not None else None,
            }
        )

    if assets_dir is not None:
        app.mount("/", StaticFiles(directory=str(assets_dir), html=True), name="ui")

    return app
