"""FastAPI application exposing the estimation and study handlers.

Run with any ASGI server, for example::

    uvicorn whittlemix.service.app:app

Domain errors surface as machine-readable JSON bodies
``{"error_type": ..., "message": ...}``: invalid inputs map to 422,
numerical failures (factorization, convergence, applicability) to 500.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import WhittlemixError
from . import api
from .schemas import (DiagnoseRequest, DiagnoseResponse, FitRequest,
                      FitResponse, FillRequest, ForecastRequest,
                      GapExperimentRequest, GapExperimentResponse,
                      PredictionResponse, SimulateRequest, SimulateResponse)


def _status_for(error: WhittlemixError) -> int:
    return 422 if isinstance(error, ValueError) else 500


def create_app() -> FastAPI:
    app = FastAPI(title="whittlemix", version=__version__)

    @app.exception_handler(WhittlemixError)
    async def _domain_error(request: Request, error: WhittlemixError):
        return JSONResponse(
            status_code=_status_for(error),
            content={"error_type": type(error).__name__,
                     "message": str(error)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/fit", response_model=FitResponse)
    def fit_endpoint(request: FitRequest) -> FitResponse:
        return api.perform_fit(request)

    @app.post("/fill", response_model=PredictionResponse)
    def fill_endpoint(request: FillRequest) -> PredictionResponse:
        return api.perform_fill(request)

    @app.post("/forecast", response_model=PredictionResponse)
    def forecast_endpoint(request: ForecastRequest) -> PredictionResponse:
        return api.perform_forecast(request)

    @app.post("/diagnose", response_model=DiagnoseResponse)
    def diagnose_endpoint(request: DiagnoseRequest) -> DiagnoseResponse:
        return api.perform_diagnose(request)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate_endpoint(request: SimulateRequest) -> SimulateResponse:
        return api.perform_simulate(request)

    @app.post("/gap-experiment", response_model=GapExperimentResponse)
    def gap_endpoint(request: GapExperimentRequest) -> GapExperimentResponse:
        return api.perform_gap_experiment(request)

    return app


app = create_app()
