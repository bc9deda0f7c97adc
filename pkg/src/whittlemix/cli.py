"""Command-line surface: ingest CSV files, run one job, write data files.

Commands
--------
``fit``
    Estimate all parameters; write ``report.json``.
``fill``
    Fit, then predict every missing in-sample value;
    write ``predictions.csv`` and ``report.json``.
``forecast``
    Fit, then predict past the sample end; same files as ``fill``.
``diagnose``
    Fit, then export residual-autocovariance and quantile tables
    (``residual_acv.csv``, ``qq.csv``) for plotting.
``simulate``
    Run the configured scenario study, and optionally a gap experiment
    on one simulated replicate; write ``results.csv``, ``summary.json``.
``gap-experiment``
    Compare two fits on ingested data by repeatedly hiding observed
    runs and predicting them back; write ``gap_experiment.csv``.

Every command resolves its configuration from one JSON document (all
fields defaulted, unknown keys rejected), echoes the resolved form to
``config.resolved.json``, and writes outputs atomically (temporary
file + rename).  Outputs are a pure function of the input files,
configuration, and seed: reruns are byte-identical except the
``created_utc`` stamp, which lives only in each report's ``metadata``
object (per-replicate wall times are likewise kept out of the data
files and only a total duration enters the metadata).

Exit codes: 0 success; 2 bad configuration; 3 bad input data;
4 numerical failure, including any non-converged fit unless
``--allow-nonconverged`` is set; 1 unexpected.  Failures leave a
machine-readable ``error.json`` in the output directory.

By default the work runs in-process; ``--server URL`` posts the same
request to a running service instead.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import __version__
from .errors import (ConvergenceError, DesignError, FactorizationError,
                     IngestError, MaskError, NotApplicableError,
                     ParameterDomainError, SpectrumDomainError,
                     WhittlemixError)
from .ingest import (TimeAxis, align_exogenous, deseasonalise_monthly,
                     read_exogenous_csv, read_series_csv)
from .series import ObservedSeries
from .service import api
from .service.schemas import (DiagnoseRequest, DiagnoseResponse, FitRequest,
                              FitResponse, FillRequest, ForecastRequest,
                              GapExperimentRequest, GapExperimentResponse,
                              GapResultModel, PredictionResponse, RunConfig,
                              SeriesPayload, SimulateRequest,
                              SimulateResponse)

_WALL_METRIC = "wall_seconds"
_CONVERGED_METRIC = "converged"

_ERROR_TYPES = {cls.__name__: cls for cls in (
    ParameterDomainError, SpectrumDomainError, MaskError, DesignError,
    IngestError, FactorizationError, NotApplicableError, ConvergenceError)}


class _RemoteRequestError(WhittlemixError, ValueError):
    """The server rejected the request body (configuration problem)."""


def _exit_code_for(error: Exception) -> int:
    if isinstance(error, (ValidationError, _RemoteRequestError)):
        return 2
    if isinstance(error, (IngestError, DesignError, MaskError)):
        return 3
    if isinstance(error, (ParameterDomainError, SpectrumDomainError,
                          FactorizationError, NotApplicableError,
                          ConvergenceError, FloatingPointError)):
        return 4
    return 1


# --------------------------------------------------------------------------
# atomic output writing


def _write_atomic(path: Path, text: str) -> None:
    descriptor, temp_name = tempfile.mkstemp(
        dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(descriptor, "w", newline="") as handle:
            handle.write(text)
        os.replace(temp_name, path)
    except BaseException:
        try:
            os.unlink(temp_name)
        except OSError:
            pass
        raise


def _write_json(path: Path, payload) -> None:
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _csv_text(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _write_error(out_dir: Path | None, error: Exception, code: int) -> None:
    payload = {"error_type": type(error).__name__, "message": str(error),
               "exit_code": code}
    print(f"error: {payload['error_type']}: {payload['message']}",
          file=sys.stderr)
    if out_dir is not None and out_dir.is_dir():
        try:
            _write_json(out_dir / "error.json", payload)
        except OSError:
            pass


# --------------------------------------------------------------------------
# configuration and data loading


def _seed_value(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"seed must be an integer, "
                                         f"got {text!r}") from exc
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(
            f"seed must lie in [0, 2^64), got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, "
                                         f"got {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a value >= 1, "
                                         f"got {value}")
    return value


def _load_config(args) -> RunConfig:
    if args.config is None:
        config = RunConfig()
    else:
        config = RunConfig.model_validate_json(Path(args.config).read_text())
    if args.seed is not None:
        config.fit.optimizer.seed = args.seed
        config.simulate.base_seed = args.seed
        config.gap.seed = args.seed
    return config


@dataclass(frozen=True)
class _LoadedData:
    """Parsed input files plus the lag window the design implies."""

    axis: TimeAxis
    series: ObservedSeries
    exog_axis: TimeAxis | None
    exog_values: np.ndarray | None
    window: int
    needs_exogenous: bool
    deseasonalised: bool


def _load_data(args, design_components) -> _LoadedData:
    axis, series = read_series_csv(args.series)
    windows = [c.window for c in design_components
               if c.kind == "irf_covariate"]
    needs = bool(windows)
    if needs and args.exog is None:
        raise DesignError(
            "the design contains a lagged exogenous column; provide the "
            "driver file with --exog")
    exog_axis = exog_values = None
    if needs:
        exog_axis, exog_values = read_exogenous_csv(args.exog)
        if args.deseasonalise_exog:
            exog_values = deseasonalise_monthly(exog_values, exog_axis)
    return _LoadedData(axis, series, exog_axis, exog_values,
                       max(windows, default=1), needs,
                       needs and args.deseasonalise_exog)


def _exog_list(data: _LoadedData, horizon: int = 0) -> list[float] | None:
    if not data.needs_exogenous:
        return None
    aligned = align_exogenous(data.exog_axis, data.exog_values, data.axis,
                              window=data.window, horizon=horizon)
    return [float(v) for v in aligned]


def _series_payload(series: ObservedSeries) -> SeriesPayload:
    values = [float(v) if observed else None
              for v, observed in zip(series.values, series.mask)]
    return SeriesPayload(values=values)


def _ingest_metadata(args, data: _LoadedData) -> dict:
    series_info = {
        "path": str(args.series),
        "time_format": data.axis.kind,
        "start": data.axis.label(0),
        "n": data.series.n,
        "n_observed": data.series.n_observed,
        "missing_percent": 100.0 * data.series.missing_fraction,
    }
    exog_info = None
    if data.exog_axis is not None:
        exog_info = {
            "path": str(args.exog),
            "time_format": data.exog_axis.kind,
            "start": data.exog_axis.label(0),
            "n": data.exog_axis.n,
            "deseasonalised": data.deseasonalised,
        }
    return {"series": series_info, "exogenous": exog_info}


def _metadata(args, started: float, extra: dict | None = None) -> dict:
    payload = {
        "command": args.command,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "duration_seconds": time.monotonic() - started,
        "package_version": __version__,
    }
    if extra:
        payload.update(extra)
    return payload


# --------------------------------------------------------------------------
# local/remote dispatch


def _post(url: str, payload: dict) -> tuple[int, object]:
    import httpx

    response = httpx.post(url, json=payload, timeout=None)
    try:
        body = response.json()
    except ValueError:
        body = response.text
    return response.status_code, body


def _invoke(args, path: str, request, response_cls, local):
    if not args.server:
        return local(request)
    status, body = _post(args.server.rstrip("/") + path,
                         request.model_dump(mode="json"))
    if status == 200:
        return response_cls.model_validate(body)
    if isinstance(body, dict) and "error_type" in body:
        error_cls = _ERROR_TYPES.get(body["error_type"], WhittlemixError)
        raise error_cls(body.get("message", ""))
    raise _RemoteRequestError(f"server rejected the request "
                              f"({status}): {body}")


# --------------------------------------------------------------------------
# commands


def _cmd_fit(args, config: RunConfig, out_dir: Path) -> bool:
    started = time.monotonic()
    data = _load_data(args, config.fit.design)
    request = FitRequest(series=_series_payload(data.series),
                         exog=_exog_list(data), settings=config.fit)
    response = _invoke(args, "/fit", request, FitResponse, api.perform_fit)
    _write_json(out_dir / "report.json", {
        "metadata": _metadata(args, started),
        "ingest": _ingest_metadata(args, data),
        "fit": response.fit.model_dump(mode="json"),
    })
    return response.fit.converged


def _prediction_files(args, config, out_dir, data: _LoadedData,
                      response: PredictionResponse, started: float) -> None:
    rows = [[data.axis.label(entry.time - 1), repr(entry.mean),
             repr(entry.variance), repr(entry.lower), repr(entry.upper)]
            for entry in response.predictions]
    _write_atomic(out_dir / "predictions.csv", _csv_text(
        ["time", "mean", "variance", "lower", "upper"], rows))
    _write_json(out_dir / "report.json", {
        "metadata": _metadata(args, started),
        "ingest": _ingest_metadata(args, data),
        "fit": response.fit.model_dump(mode="json"),
        "prediction": {
            "level": response.level,
            "count": len(response.predictions),
            "jitter_escalations": response.jitter_escalations,
            "clamp_events": response.clamp_events,
        },
    })


def _cmd_fill(args, config: RunConfig, out_dir: Path) -> bool:
    started = time.monotonic()
    data = _load_data(args, config.fit.design)
    request = FillRequest(series=_series_payload(data.series),
                          exog=_exog_list(data), settings=config.fit,
                          level=config.fill.level)
    response = _invoke(args, "/fill", request, PredictionResponse,
                       api.perform_fill)
    _prediction_files(args, config, out_dir, data, response, started)
    return response.fit.converged


def _cmd_forecast(args, config: RunConfig, out_dir: Path) -> bool:
    started = time.monotonic()
    data = _load_data(args, config.fit.design)
    horizon = config.forecast.horizon
    request = ForecastRequest(series=_series_payload(data.series),
                              exog=_exog_list(data, horizon=horizon),
                              settings=config.fit,
                              level=config.forecast.level, horizon=horizon)
    response = _invoke(args, "/forecast", request, PredictionResponse,
                       api.perform_forecast)
    _prediction_files(args, config, out_dir, data, response, started)
    return response.fit.converged


def _cmd_diagnose(args, config: RunConfig, out_dir: Path) -> bool:
    started = time.monotonic()
    data = _load_data(args, config.fit.design)
    request = DiagnoseRequest(series=_series_payload(data.series),
                              exog=_exog_list(data), settings=config.fit,
                              max_lag=config.diagnose.max_lag)
    response = _invoke(args, "/diagnose", request, DiagnoseResponse,
                       api.perform_diagnose)
    acv_rows = [[entry.lag,
                 "" if entry.empirical is None else repr(entry.empirical),
                 repr(entry.model)] for entry in response.acv]
    _write_atomic(out_dir / "residual_acv.csv",
                  _csv_text(["lag", "empirical", "model"], acv_rows))
    qq_rows = [[repr(entry.probability), repr(entry.residual),
                repr(entry.gaussian), repr(entry.aep)]
               for entry in response.qq]
    _write_atomic(out_dir / "qq.csv", _csv_text(
        ["probability", "residual", "gaussian", "aep"], qq_rows))
    _write_json(out_dir / "report.json", {
        "metadata": _metadata(args, started),
        "ingest": _ingest_metadata(args, data),
        "fit": response.fit.model_dump(mode="json"),
        "residuals": {
            "count": response.residual_count,
            "mean": response.residual_mean,
            "sd": response.residual_sd,
        },
        "marginal": response.marginal.model_dump(mode="json"),
    })
    return response.fit.converged and response.marginal.converged


def _gap_csv(gap: GapResultModel) -> str:
    header = ["plan", f"rmse[{gap.candidate}]", f"rmse[{gap.baseline}]",
              "reduction_percent"]
    rows = [[row.plan, repr(row.rmse[gap.candidate]),
             repr(row.rmse[gap.baseline]),
             f"{row.reduction_percent:.2f}"] for row in gap.rows]
    return _csv_text(header, rows)


def _cmd_simulate(args, config: RunConfig, out_dir: Path) -> bool:
    started = time.monotonic()
    request = SimulateRequest(config=config.simulate, threads=args.threads)
    response = _invoke(args, "/simulate", request, SimulateResponse,
                       api.perform_simulate)
    kept = [row for row in response.rows if row.metric != _WALL_METRIC]
    _write_atomic(out_dir / "results.csv", _csv_text(
        ["scenario", "n", "method", "replicate", "metric", "value"],
        [[row.scenario, row.n, row.method, row.replicate, row.metric,
          repr(row.value)] for row in kept]))
    groups = [group.model_dump(mode="json") for group in response.groups
              if group.metric != _WALL_METRIC]
    _write_json(out_dir / "summary.json", {
        "groups": groups,
        "failures": [f.model_dump(mode="json") for f in response.failures],
        "failure_count": len(response.failures),
    })
    if response.gap is not None:
        _write_atomic(out_dir / "gap_experiment.csv", _gap_csv(response.gap))
    _write_json(out_dir / "report.json", {
        "metadata": _metadata(args, started),
        "study": {
            "row_count": len(kept),
            "failure_count": len(response.failures),
            "gap_experiment": response.gap is not None,
        },
    })
    converged = all(row.value == 1.0 for row in response.rows
                    if row.metric == _CONVERGED_METRIC)
    return converged and not response.failures


def _cmd_gap_experiment(args, config: RunConfig, out_dir: Path) -> bool:
    started = time.monotonic()
    data = _load_data(args, config.fit.design)
    request = GapExperimentRequest(
        series=_series_payload(data.series), exog=_exog_list(data),
        design=config.fit.design, candidate=config.gap.candidate,
        baseline=config.gap.baseline, optimizer=config.fit.optimizer,
        plans=config.gap.plans, repeats=config.gap.repeats,
        seed=config.gap.seed)
    response = _invoke(args, "/gap-experiment", request,
                       GapExperimentResponse, api.perform_gap_experiment)
    _write_atomic(out_dir / "gap_experiment.csv", _gap_csv(response.result))
    _write_json(out_dir / "report.json", {
        "metadata": _metadata(args, started),
        "ingest": _ingest_metadata(args, data),
        "fits": {label: report.model_dump(mode="json")
                 for label, report in response.fits.items()},
        "repeats": response.result.repeats,
    })
    return all(report.converged for report in response.fits.values())


_COMMANDS = {
    "fit": _cmd_fit,
    "fill": _cmd_fill,
    "forecast": _cmd_forecast,
    "diagnose": _cmd_diagnose,
    "simulate": _cmd_simulate,
    "gap-experiment": _cmd_gap_experiment,
}


# --------------------------------------------------------------------------
# argument parsing and entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whittlemix",
        description="Mixed time-series models with correlated, possibly "
                    "skewed errors: fitting, gap filling, forecasting, "
                    "diagnostics, and simulation studies.")
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "fit": "estimate all model parameters from a series file",
        "fill": "fit, then predict the missing in-sample values",
        "forecast": "fit, then predict past the end of the sample",
        "diagnose": "fit, then export residual diagnostics tables",
        "simulate": "run the configured simulation study",
        "gap-experiment": "compare two fits by hiding observed runs",
    }
    for name, description in descriptions.items():
        sub = subparsers.add_parser(name, help=description)
        sub.add_argument("--config", type=Path,
                         help="JSON configuration document")
        sub.add_argument("--out", type=Path, required=True,
                         help="output directory (created if absent)")
        sub.add_argument("--seed", type=_seed_value, default=None,
                         help="overrides every configured seed")
        sub.add_argument("--threads", type=_positive_int, default=1,
                         help="worker processes for simulation replicates")
        sub.add_argument("--server", default=None,
                         help="base URL of a running service; "
                              "default is in-process")
        sub.add_argument("--allow-nonconverged", action="store_true",
                         help="exit 0 even when a fit did not converge")
        if name != "simulate":
            sub.add_argument("--series", type=Path, required=True,
                             help="response CSV (time,value; empty cell "
                                  "= missing)")
            sub.add_argument("--exog", type=Path, default=None,
                             help="exogenous driver CSV (complete)")
            sub.add_argument("--deseasonalise-exog", action="store_true",
                             help="subtract each calendar month's mean "
                                  "from the driver")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return int(exit_request.code or 0)

    out_dir: Path = args.out
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as error:
        _write_error(None, error, 1)
        return 1
    (out_dir / "error.json").unlink(missing_ok=True)
    try:
        config = _load_config(args)
    except (ValidationError, OSError) as error:
        _write_error(out_dir, error, 2)
        return 2
    try:
        _write_json(out_dir / "config.resolved.json",
                    config.model_dump(mode="json"))
        converged = _COMMANDS[args.command](args, config, out_dir)
    except Exception as error:  # noqa: BLE001 - single exit-code boundary
        code = _exit_code_for(error)
        _write_error(out_dir, error, code)
        return code
    if not converged and not args.allow_nonconverged:
        error = ConvergenceError(
            "a fit did not converge within the optimizer budget; inspect "
            "the report, raise maxiter/restarts, or pass "
            "--allow-nonconverged to accept the best point found")
        _write_error(out_dir, error, 4)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
